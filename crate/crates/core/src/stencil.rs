//! Finite-difference stencils and cumulative quadrature on grid lines.
//!
//! Interior derivatives use the 4th-order central stencil; the first and
//! last nodes use 2nd-order one-sided stencils and their neighbours the
//! 2nd-order central stencil. Residual norms are therefore reported on
//! interior nodes only (see `surface`).
//!
//! Cumulative integration fits a cubic through four neighbouring samples
//! and integrates it over one cell, which is exact for polynomials of
//! degree <= 3.

use crate::grid::Grid2;

/// First derivative of samples on a uniform line with spacing `h`.
pub fn deriv_line(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "need at least 3 samples");
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        if n >= 5 && i >= 2 && i <= n - 3 {
            d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        } else {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
    }
    d
}

/// Cumulative integral along a uniform line, `out[0] = 0`.
pub fn cumint_line(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 2, "need at least 2 samples");
    let mut acc = vec![0.0; n];
    if n < 4 {
        for i in 1..n {
            acc[i] = acc[i - 1] + h * (f[i - 1] + f[i]) / 2.0;
        }
        return acc;
    }
    // first cell: cubic through f[0..4]
    acc[1] = acc[0] + h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    // interior cells: cubic through the two samples on each side
    for i in 1..n - 2 {
        acc[i + 1] = acc[i] + h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    }
    // last cell: cubic through the trailing four samples
    acc[n - 1] =
        acc[n - 2] + h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    acc
}

/// Partial derivative in the `u` (first index) direction.
pub fn deriv_u(f: &Grid2<f64>, du: f64) -> Grid2<f64> {
    let mut out = Grid2::filled(f.nu, f.nv, 0.0);
    let mut line = vec![0.0; f.nu];
    for j in 0..f.nv {
        for i in 0..f.nu {
            line[i] = *f.get(i, j);
        }
        let d = deriv_line(&line, du);
        for i in 0..f.nu {
            out.set(i, j, d[i]);
        }
    }
    out
}

/// Partial derivative in the `v` (second index) direction.
pub fn deriv_v(f: &Grid2<f64>, dv: f64) -> Grid2<f64> {
    let mut out = Grid2::filled(f.nu, f.nv, 0.0);
    let mut line = vec![0.0; f.nv];
    for i in 0..f.nu {
        for j in 0..f.nv {
            line[j] = *f.get(i, j);
        }
        let d = deriv_line(&line, dv);
        for j in 0..f.nv {
            out.set(i, j, d[j]);
        }
    }
    out
}

/// Mixed second partial `f_uv`.
pub fn deriv_uv(f: &Grid2<f64>, du: f64, dv: f64) -> Grid2<f64> {
    deriv_v(&deriv_u(f, du), dv)
}
