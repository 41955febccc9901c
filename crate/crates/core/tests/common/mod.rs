//! Finite-difference Riemann oracle for the coordinate metric
//! diag(-1, e^{-2 mu1 x0}, e^{-2 mu2 x0}).
//!
//! Christoffel symbols come from central differences of the metric,
//! the curvature tensor from central differences of the Christoffels;
//! nothing here shares code with the closed-form connection under test.

#![allow(clippy::needless_range_loop)]

use minlor::lie_group::ModelParams;

const H: f64 = 1e-4;

fn metric(x: &[f64; 3], p: &ModelParams) -> [[f64; 3]; 3] {
    let mut g = [[0.0; 3]; 3];
    g[0][0] = -1.0;
    g[1][1] = (-2.0 * p.mu1 * x[0]).exp();
    g[2][2] = (-2.0 * p.mu2 * x[0]).exp();
    g
}

fn metric_inv(x: &[f64; 3], p: &ModelParams) -> [[f64; 3]; 3] {
    let g = metric(x, p);
    let mut inv = [[0.0; 3]; 3];
    for a in 0..3 {
        inv[a][a] = 1.0 / g[a][a];
    }
    inv
}

fn shifted(x: &[f64; 3], axis: usize, delta: f64) -> [f64; 3] {
    let mut y = *x;
    y[axis] += delta;
    y
}

/// Gamma^a_{bc} by central differences of the metric.
fn christoffel(x: &[f64; 3], p: &ModelParams) -> [[[f64; 3]; 3]; 3] {
    let inv = metric_inv(x, p);
    // dg[c][a][b] = d g_ab / d x^c
    let mut dg = [[[0.0; 3]; 3]; 3];
    for c in 0..3 {
        let plus = metric(&shifted(x, c, H), p);
        let minus = metric(&shifted(x, c, -H), p);
        for a in 0..3 {
            for b in 0..3 {
                dg[c][a][b] = (plus[a][b] - minus[a][b]) / (2.0 * H);
            }
        }
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut sum = 0.0;
                for d in 0..3 {
                    sum += inv[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                }
                gamma[a][b][c] = sum / 2.0;
            }
        }
    }
    gamma
}

/// R^a_{bcd} by central differences of the Christoffel symbols.
fn riemann(x: &[f64; 3], p: &ModelParams) -> [[[[f64; 3]; 3]; 3]; 3] {
    let gamma = christoffel(x, p);
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for c in 0..3 {
        let plus = christoffel(&shifted(x, c, H), p);
        let minus = christoffel(&shifted(x, c, -H), p);
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    dgamma[c][a][b][d] = (plus[a][b][d] - minus[a][b][d]) / (2.0 * H);
                }
            }
        }
    }
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut val = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                    for e in 0..3 {
                        val += gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b];
                    }
                    r[a][b][c][d] = val;
                }
            }
        }
    }
    r
}

/// Sectional curvature K(X, Y) = <R(X,Y)Y, X> / (<X,X><Y,Y> - <X,Y>^2)
/// for coordinate-component vectors at x.
pub fn sectional_curvature_fd(x: &[f64; 3], xv: &[f64; 3], yv: &[f64; 3], p: &ModelParams) -> f64 {
    let g = metric(x, p);
    let r = riemann(x, p);
    let dot = |a: &[f64; 3], b: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += g[i][j] * a[i] * b[j];
            }
        }
        s
    };
    // (R(X,Y)Y)^a = R^a_{bcd} Y^b X^c Y^d
    let mut rxyy = [0.0; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    rxyy[a] += r[a][b][c][d] * yv[b] * xv[c] * yv[d];
                }
            }
        }
    }
    let num = dot(&rxyy, xv);
    let den = dot(xv, xv) * dot(yv, yv) - dot(xv, yv).powi(2);
    num / den
}

/// The left-invariant frame vector e_i expressed in coordinate
/// components at x.
pub fn frame_vector(i: usize, x: &[f64; 3], p: &ModelParams) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[i] = match i {
        0 => 1.0,
        1 => (p.mu1 * x[0]).exp(),
        2 => (p.mu2 * x[0]).exp(),
        _ => unreachable!(),
    };
    v
}
