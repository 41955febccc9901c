//! Weierstrass data `(q, f, r, g)`, the characteristic (Goursat) solver for
//! its first-order PDE system, and integration of the representation
//! formula into an immersion.
//!
//! The data determine null spinor coefficients
//! `xi = (f(1+q^2)/2, -f(1-q^2)/2, -q f)` and
//! `eta = (-g(1+r^2)/2, -g(1-r^2)/2, -r g)`; minimality requires
//!
//! ```text
//! f_v = (mu1/2)(1-r^2) f g + mu2 q r f g        (q, f evolve in v)
//! q_v = -(mu1/2) q (1-r^2) g + (mu2/2)(1-q^2) r g
//! g_u = -(mu1/2)(1-q^2) f g - mu2 q r f g        (r, g evolve in u)
//! r_u = (mu1/2)(1-q^2) r f - (mu2/2) q (1-r^2) f
//! ```
//!
//! with `(q, f)` prescribed on the characteristic `v = v0` and `(r, g)` on
//! `u = u0`. The surface is recovered from
//! `dx0 = xi0 du + eta0 dv`,
//! `dx1 = e^{mu1 x0} (xi1 du + eta1 dv)`,
//! `dx2 = e^{mu2 x0} (xi2 du + eta2 dv)`
//! with the exponential inside the integrand, which is the closed form on
//! solved data.

use serde::{Deserialize, Serialize};

use crate::grid::{Grid2, NullGrid};
use crate::lie_group::{classify, GroupElement, ModelParams, SpaceForm};
use crate::stencil::{cumint_line, deriv_u, deriv_v};
use crate::surface::ImmersionPatch;
use crate::{Error, Result};

/// Distance from the degenerate loci `q^2 = 1`, `r^2 = 1`, `f = 0`,
/// `g = 0`, `1 + qr = 0` below which the solver aborts.
pub const REGULARITY_TOL: f64 = 1e-8;

/// Grids of `(q, f, r, g)` over a null rectangle.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub grid: NullGrid,
    pub q: Grid2<f64>,
    pub f: Grid2<f64>,
    pub r: Grid2<f64>,
    pub g: Grid2<f64>,
    pub params: ModelParams,
}

impl WeierstrassData {
    /// Sample data from pointwise functions (used for the Minkowski case
    /// and for negative controls; makes no claim that the PDEs hold).
    pub fn from_fns(
        grid: NullGrid,
        params: ModelParams,
        mut qf: impl FnMut(f64, f64) -> f64,
        mut ff: impl FnMut(f64, f64) -> f64,
        mut rf: impl FnMut(f64, f64) -> f64,
        mut gf: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        WeierstrassData {
            grid,
            q: Grid2::from_fn(grid.nu, grid.nv, |i, j| qf(grid.u(i), grid.v(j))),
            f: Grid2::from_fn(grid.nu, grid.nv, |i, j| ff(grid.u(i), grid.v(j))),
            r: Grid2::from_fn(grid.nu, grid.nv, |i, j| rf(grid.u(i), grid.v(j))),
            g: Grid2::from_fn(grid.nu, grid.nv, |i, j| gf(grid.u(i), grid.v(j))),
            params,
        }
    }

    /// Check the regularity invariants at every node.
    pub fn check_regularity(&self) -> Result<()> {
        for i in 0..self.grid.nu {
            for j in 0..self.grid.nv {
                check_node_regularity(
                    *self.q.get(i, j),
                    *self.f.get(i, j),
                    *self.r.get(i, j),
                    *self.g.get(i, j),
                    i,
                    j,
                )?;
            }
        }
        Ok(())
    }
}

fn check_node_regularity(q: f64, f: f64, r: f64, g: f64, i: usize, j: usize) -> Result<()> {
    let fail = |what: &str| {
        Err(Error::Regularity {
            i,
            j,
            what: what.to_string(),
        })
    };
    if !(q.is_finite() && f.is_finite() && r.is_finite() && g.is_finite()) {
        return Err(Error::NumericalAbort {
            i,
            j,
            what: "non-finite data (NaN or overflow)".to_string(),
        });
    }
    if (q * q - 1.0).abs() < REGULARITY_TOL {
        return fail("q^2 = 1");
    }
    if (r * r - 1.0).abs() < REGULARITY_TOL {
        return fail("r^2 = 1");
    }
    if f.abs() < REGULARITY_TOL {
        return fail("f = 0");
    }
    if g.abs() < REGULARITY_TOL {
        return fail("g = 0");
    }
    if (1.0 + q * r).abs() < REGULARITY_TOL {
        return fail("1 + qr = 0");
    }
    Ok(())
}

/// Null spinor coefficients of the pullback forms,
/// `(omega^i)' = xi^i du`, `(omega^i)'' = eta^i dv`.
#[derive(Debug, Clone)]
pub struct SpinorCoefficients {
    pub xi0: Grid2<f64>,
    pub xi1: Grid2<f64>,
    pub xi2: Grid2<f64>,
    pub eta0: Grid2<f64>,
    pub eta1: Grid2<f64>,
    pub eta2: Grid2<f64>,
}

/// Pointwise spinor coefficients from `(q, f)`: exactly null by
/// construction.
pub fn xi_of(q: f64, f: f64) -> [f64; 3] {
    [f * (1.0 + q * q) / 2.0, -f * (1.0 - q * q) / 2.0, -q * f]
}

/// Pointwise spinor coefficients from `(r, g)`.
pub fn eta_of(r: f64, g: f64) -> [f64; 3] {
    [-g * (1.0 + r * r) / 2.0, -g * (1.0 - r * r) / 2.0, -r * g]
}

pub fn spinor_from_data(d: &WeierstrassData) -> Result<SpinorCoefficients> {
    for (i, j, &fval) in d.f.enumerate() {
        if fval == 0.0 {
            return Err(Error::DegenerateData {
                i,
                j,
                what: "f = 0".to_string(),
            });
        }
    }
    for (i, j, &gval) in d.g.enumerate() {
        if gval == 0.0 {
            return Err(Error::DegenerateData {
                i,
                j,
                what: "g = 0".to_string(),
            });
        }
    }
    let build = |pick: fn([f64; 3]) -> f64, from_q: bool| {
        if from_q {
            d.q.zip_map(&d.f, |&q, &f| pick(xi_of(q, f)))
        } else {
            d.r.zip_map(&d.g, |&r, &g| pick(eta_of(r, g)))
        }
    };
    Ok(SpinorCoefficients {
        xi0: build(|x| x[0], true),
        xi1: build(|x| x[1], true),
        xi2: build(|x| x[2], true),
        eta0: build(|x| x[0], false),
        eta1: build(|x| x[1], false),
        eta2: build(|x| x[2], false),
    })
}

/// Exact algebraic inverse of `xi_of`/`eta_of`:
/// `q = -xi2/(xi0 - xi1)`, `f = xi0 - xi1`, `r = eta2/(eta0 + eta1)`,
/// `g = -(eta0 + eta1)`.
pub fn data_from_spinor(xi: &[f64; 3], eta: &[f64; 3]) -> (f64, f64, f64, f64) {
    let f = xi[0] - xi[1];
    let q = -xi[2] / f;
    let g = -(eta[0] + eta[1]);
    let r = eta[2] / (eta[0] + eta[1]);
    (q, f, r, g)
}

/// Characteristic initial data: `(q, f)` sampled on `v = v0` and `(r, g)`
/// sampled on `u = u0`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub q_edge: Vec<f64>,
    pub f_edge: Vec<f64>,
    pub r_edge: Vec<f64>,
    pub g_edge: Vec<f64>,
}

impl BoundaryData {
    pub fn from_fns(
        grid: &NullGrid,
        mut q_of_u: impl FnMut(f64) -> f64,
        mut f_of_u: impl FnMut(f64) -> f64,
        mut r_of_v: impl FnMut(f64) -> f64,
        mut g_of_v: impl FnMut(f64) -> f64,
    ) -> Self {
        BoundaryData {
            q_edge: (0..grid.nu).map(|i| q_of_u(grid.u(i))).collect(),
            f_edge: (0..grid.nu).map(|i| f_of_u(grid.u(i))).collect(),
            r_edge: (0..grid.nv).map(|j| r_of_v(grid.v(j))).collect(),
            g_edge: (0..grid.nv).map(|j| g_of_v(grid.v(j))).collect(),
        }
    }

    /// Regularity of the edge samples (errors name the edge node).
    pub fn check_regularity(&self) -> Result<()> {
        for (i, (&q, &f)) in self.q_edge.iter().zip(&self.f_edge).enumerate() {
            check_node_regularity(q, f, 0.0, 1.0, i, 0).map_err(|e| match e {
                Error::Regularity { i, what, .. } => Error::Regularity {
                    i,
                    j: 0,
                    what: format!("on edge v = v0: {what}"),
                },
                other => other,
            })?;
        }
        for (j, (&r, &g)) in self.r_edge.iter().zip(&self.g_edge).enumerate() {
            check_node_regularity(0.0, 1.0, r, g, 0, j).map_err(|e| match e {
                Error::Regularity { j, what, .. } => Error::Regularity {
                    i: 0,
                    j,
                    what: format!("on edge u = u0: {what}"),
                },
                other => other,
            })?;
        }
        Ok(())
    }
}

/// Goursat march configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Method order: 1 (explicit Euler) or 2 (predictor-corrector).
    pub order: usize,
    /// Fixed-point iterations coupling the two characteristic families
    /// per cell (order 2 only).
    pub corrector_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            order: 2,
            corrector_iters: 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    q: f64,
    f: f64,
    r: f64,
    g: f64,
}

/// Right-hand sides of the four evolution equations.
fn rhs_v(s: State, p: &ModelParams) -> (f64, f64) {
    let qdot =
        -p.mu1 / 2.0 * s.q * (1.0 - s.r * s.r) * s.g + p.mu2 / 2.0 * (1.0 - s.q * s.q) * s.r * s.g;
    let fdot = p.mu1 / 2.0 * (1.0 - s.r * s.r) * s.f * s.g + p.mu2 * s.q * s.r * s.f * s.g;
    (qdot, fdot)
}

fn rhs_u(s: State, p: &ModelParams) -> (f64, f64) {
    let rdot =
        p.mu1 / 2.0 * (1.0 - s.q * s.q) * s.r * s.f - p.mu2 / 2.0 * s.q * (1.0 - s.r * s.r) * s.f;
    let gdot = -p.mu1 / 2.0 * (1.0 - s.q * s.q) * s.f * s.g - p.mu2 * s.q * s.r * s.f * s.g;
    (rdot, gdot)
}

/// Solve the characteristic initial-value problem on `grid`.
///
/// `(q, f)` advance one `v`-level at a time, `(r, g)` march along each
/// `v`-level in `u`; with `order = 2` each cell runs an explicit
/// predictor-corrector, iterating the cross-coupling `corrector_iters`
/// times. The sweep is sequential and deterministic.
pub fn goursat_solve(
    b: &BoundaryData,
    p: &ModelParams,
    grid: &NullGrid,
    cfg: &SolverConfig,
) -> Result<WeierstrassData> {
    if b.q_edge.len() != grid.nu || b.r_edge.len() != grid.nv {
        return Err(Error::Config(format!(
            "boundary sample counts ({}, {}) do not match grid ({}, {})",
            b.q_edge.len(),
            b.r_edge.len(),
            grid.nu,
            grid.nv
        )));
    }
    if cfg.order != 1 && cfg.order != 2 {
        return Err(Error::Config(format!(
            "solver order must be 1 or 2, got {}",
            cfg.order
        )));
    }
    b.check_regularity()?;

    let (nu, nv) = (grid.nu, grid.nv);
    let (du, dv) = (grid.du, grid.dv);
    let mut q = Grid2::filled(nu, nv, 0.0);
    let mut f = Grid2::filled(nu, nv, 0.0);
    let mut r = Grid2::filled(nu, nv, 0.0);
    let mut g = Grid2::filled(nu, nv, 0.0);

    for i in 0..nu {
        q.set(i, 0, b.q_edge[i]);
        f.set(i, 0, b.f_edge[i]);
    }
    for j in 0..nv {
        r.set(0, j, b.r_edge[j]);
        g.set(0, j, b.g_edge[j]);
    }

    // (r, g) along the bottom row j = 0
    for i in 1..nu {
        let prev = State {
            q: *q.get(i - 1, 0),
            f: *f.get(i - 1, 0),
            r: *r.get(i - 1, 0),
            g: *g.get(i - 1, 0),
        };
        let (k_r, k_g) = rhs_u(prev, p);
        let mut rn = prev.r + du * k_r;
        let mut gn = prev.g + du * k_g;
        if cfg.order == 2 {
            for _ in 0..cfg.corrector_iters {
                let trial = State {
                    q: *q.get(i, 0),
                    f: *f.get(i, 0),
                    r: rn,
                    g: gn,
                };
                let (k2_r, k2_g) = rhs_u(trial, p);
                rn = prev.r + du / 2.0 * (k_r + k2_r);
                gn = prev.g + du / 2.0 * (k_g + k2_g);
            }
        }
        r.set(i, 0, rn);
        g.set(i, 0, gn);
        check_node_regularity(*q.get(i, 0), *f.get(i, 0), rn, gn, i, 0)?;
    }

    // (q, f) along the left column i = 0
    for j in 1..nv {
        let prev = State {
            q: *q.get(0, j - 1),
            f: *f.get(0, j - 1),
            r: *r.get(0, j - 1),
            g: *g.get(0, j - 1),
        };
        let (k_q, k_f) = rhs_v(prev, p);
        let mut qn = prev.q + dv * k_q;
        let mut fn_ = prev.f + dv * k_f;
        if cfg.order == 2 {
            for _ in 0..cfg.corrector_iters {
                let trial = State {
                    q: qn,
                    f: fn_,
                    r: *r.get(0, j),
                    g: *g.get(0, j),
                };
                let (k2_q, k2_f) = rhs_v(trial, p);
                qn = prev.q + dv / 2.0 * (k_q + k2_q);
                fn_ = prev.f + dv / 2.0 * (k_f + k2_f);
            }
        }
        q.set(0, j, qn);
        f.set(0, j, fn_);
        check_node_regularity(qn, fn_, *r.get(0, j), *g.get(0, j), 0, j)?;
    }

    // interior sweep, row by row
    for j in 1..nv {
        for i in 1..nu {
            let below = State {
                q: *q.get(i, j - 1),
                f: *f.get(i, j - 1),
                r: *r.get(i, j - 1),
                g: *g.get(i, j - 1),
            };
            let left = State {
                q: *q.get(i - 1, j),
                f: *f.get(i - 1, j),
                r: *r.get(i - 1, j),
                g: *g.get(i - 1, j),
            };
            let (kv_q, kv_f) = rhs_v(below, p);
            let (ku_r, ku_g) = rhs_u(left, p);
            // Euler predictors
            let mut qn = below.q + dv * kv_q;
            let mut fn_ = below.f + dv * kv_f;
            let mut rn = left.r + du * ku_r;
            let mut gn = left.g + du * ku_g;
            if cfg.order == 2 {
                for _ in 0..cfg.corrector_iters {
                    let trial = State {
                        q: qn,
                        f: fn_,
                        r: rn,
                        g: gn,
                    };
                    let (kv2_q, kv2_f) = rhs_v(trial, p);
                    let (ku2_r, ku2_g) = rhs_u(trial, p);
                    qn = below.q + dv / 2.0 * (kv_q + kv2_q);
                    fn_ = below.f + dv / 2.0 * (kv_f + kv2_f);
                    rn = left.r + du / 2.0 * (ku_r + ku2_r);
                    gn = left.g + du / 2.0 * (ku_g + ku2_g);
                }
            }
            q.set(i, j, qn);
            f.set(i, j, fn_);
            r.set(i, j, rn);
            g.set(i, j, gn);
            check_node_regularity(qn, fn_, rn, gn, i, j)?;
        }
    }

    Ok(WeierstrassData {
        grid: *grid,
        q,
        f,
        r,
        g,
        params: *p,
    })
}

/// Order in which the staircase path runs from the base corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// Along `v = v0` in `u` first, then up in `v`.
    UThenV,
    /// Along `u = u0` in `v` first, then across in `u`.
    VThenU,
}

/// Integrate the representation formula into an immersion with base point
/// `phi(u0, v0) = (0, 0, 0)`.
///
/// `x0` first from `dx0 = xi0 du + eta0 dv`, then `x1, x2` with the factor
/// `e^{mu_i x0}` inside the integrand. Quadrature is the 4th-order
/// cumulative rule, exact for polynomial integrands of degree <= 3.
pub fn integrate_surface(d: &WeierstrassData) -> Result<ImmersionPatch> {
    integrate_surface_path(d, PathOrder::UThenV)
}

pub fn integrate_surface_path(d: &WeierstrassData, order: PathOrder) -> Result<ImmersionPatch> {
    let sp = spinor_from_data(d)?;
    let grid = &d.grid;
    let p = &d.params;

    let x0 = integrate_form(&sp.xi0, &sp.eta0, grid, order);
    let exp_of = |mu: f64| x0.map(|&t| (mu * t).exp());
    let e1 = exp_of(p.mu1);
    let e2 = exp_of(p.mu2);
    let x1 = integrate_form(
        &e1.zip_map(&sp.xi1, |a, b| a * b),
        &e1.zip_map(&sp.eta1, |a, b| a * b),
        grid,
        order,
    );
    let x2 = integrate_form(
        &e2.zip_map(&sp.xi2, |a, b| a * b),
        &e2.zip_map(&sp.eta2, |a, b| a * b),
        grid,
        order,
    );

    let points = Grid2::from_fn(grid.nu, grid.nv, |i, j| {
        GroupElement::new(*x0.get(i, j), *x1.get(i, j), *x2.get(i, j))
    });
    for (i, j, pt) in points.enumerate() {
        if !pt.is_finite() {
            return Err(Error::NumericalAbort {
                i,
                j,
                what: "non-finite surface point".to_string(),
            });
        }
    }
    Ok(ImmersionPatch::new(*grid, points, *p))
}

/// Staircase integral of the 1-form `a du + b dv` from the grid origin.
fn integrate_form(a: &Grid2<f64>, b: &Grid2<f64>, grid: &NullGrid, order: PathOrder) -> Grid2<f64> {
    let (nu, nv) = (grid.nu, grid.nv);
    let mut out = Grid2::filled(nu, nv, 0.0);
    match order {
        PathOrder::UThenV => {
            let row0: Vec<f64> = (0..nu).map(|i| *a.get(i, 0)).collect();
            let base = cumint_line(&row0, grid.du);
            for i in 0..nu {
                let col: Vec<f64> = (0..nv).map(|j| *b.get(i, j)).collect();
                let acc = cumint_line(&col, grid.dv);
                for j in 0..nv {
                    out.set(i, j, base[i] + acc[j]);
                }
            }
        }
        PathOrder::VThenU => {
            let col0: Vec<f64> = (0..nv).map(|j| *b.get(0, j)).collect();
            let base = cumint_line(&col0, grid.dv);
            for j in 0..nv {
                let row: Vec<f64> = (0..nu).map(|i| *a.get(i, j)).collect();
                let acc = cumint_line(&row, grid.du);
                for i in 0..nu {
                    out.set(i, j, base[j] + acc[i]);
                }
            }
        }
    }
    out
}

/// Discrete mixed-partial (integrability) residuals of the spinor system:
/// `xi0_v - (mu1 eta1 xi1 + mu2 eta2 xi2)`, `xi_i_v - mu_i eta_i xi0`, and
/// the `eta`/`u` counterparts. Returns the per-node maximum over the six.
pub fn exactness_residual(d: &WeierstrassData) -> Result<Grid2<f64>> {
    let sp = spinor_from_data(d)?;
    let grid = &d.grid;
    let p = &d.params;
    let xi0_v = deriv_v(&sp.xi0, grid.dv);
    let xi1_v = deriv_v(&sp.xi1, grid.dv);
    let xi2_v = deriv_v(&sp.xi2, grid.dv);
    let eta0_u = deriv_u(&sp.eta0, grid.du);
    let eta1_u = deriv_u(&sp.eta1, grid.du);
    let eta2_u = deriv_u(&sp.eta2, grid.du);
    Ok(Grid2::from_fn(grid.nu, grid.nv, |i, j| {
        let (xi0, xi1, xi2) = (*sp.xi0.get(i, j), *sp.xi1.get(i, j), *sp.xi2.get(i, j));
        let (eta0, eta1, eta2) = (*sp.eta0.get(i, j), *sp.eta1.get(i, j), *sp.eta2.get(i, j));
        let r0 = xi0_v.get(i, j) - (p.mu1 * eta1 * xi1 + p.mu2 * eta2 * xi2);
        let r1 = xi1_v.get(i, j) - p.mu1 * eta1 * xi0;
        let r2 = xi2_v.get(i, j) - p.mu2 * eta2 * xi0;
        let s0 = eta0_u.get(i, j) - (p.mu1 * xi1 * eta1 + p.mu2 * xi2 * eta2);
        let s1 = eta1_u.get(i, j) - p.mu1 * xi1 * eta0;
        let s2 = eta2_u.get(i, j) - p.mu2 * xi2 * eta0;
        r0.abs()
            .max(r1.abs())
            .max(r2.abs())
            .max(s0.abs())
            .max(s1.abs())
            .max(s2.abs())
    }))
}

/// Sample free Minkowski data: `q, f` Lorentz holomorphic (functions of
/// `u` only) and `r, g` anti-holomorphic (functions of `v` only).
pub fn generate_minkowski(
    qfun: &crate::expr::Expression,
    ffun: &crate::expr::Expression,
    rfun: &crate::expr::Expression,
    gfun: &crate::expr::Expression,
    grid: &NullGrid,
) -> Result<WeierstrassData> {
    for (name, e, allowed) in [
        ("q", qfun, 'u'),
        ("f", ffun, 'u'),
        ("r", rfun, 'v'),
        ("g", gfun, 'v'),
    ] {
        let forbidden = if allowed == 'u' { 'v' } else { 'u' };
        if e.uses_variable(forbidden) {
            return Err(Error::WrongVariable {
                name: name.to_string(),
                allowed,
                found: forbidden,
            });
        }
    }
    let d = WeierstrassData::from_fns(
        *grid,
        ModelParams::new(0.0, 0.0),
        |u, v| qfun.eval(u, v).unwrap_or(f64::NAN),
        |u, v| ffun.eval(u, v).unwrap_or(f64::NAN),
        |u, v| rfun.eval(u, v).unwrap_or(f64::NAN),
        |u, v| gfun.eval(u, v).unwrap_or(f64::NAN),
    );
    d.check_regularity()?;
    Ok(d)
}

/// Result of evaluating the `f = g = 1` normalization constraints
/// `mu2 q r = -(mu1/2)(1 - r^2)` and `mu2 q r = -(mu1/2)(1 - q^2)` on
/// data in the de Sitter regime `mu1 = mu2 = c != 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DesitterConstraintReport {
    /// Sup norms of the two constraint residuals.
    pub constraint_a_sup: f64,
    pub constraint_b_sup: f64,
    /// Sup of `|(a - b) - (mu1/2)(q^2 - r^2)|`: the subtraction identity,
    /// zero to roundoff.
    pub subtraction_identity_sup: f64,
    /// Nodes where both constraints hold within `tol` AND the data are
    /// regular AND `q = -r` AND the `q_v` evolution equation is consistent
    /// with `q` being constant in `v`. The paper's sign obstruction makes
    /// this set empty.
    pub feasible_anti_nodes: usize,
    /// Nodes where both constraints hold within `tol` (any sign relation).
    pub constrained_nodes: usize,
    pub tol: f64,
}

/// Evaluate the de Sitter normalization constraints. Errors unless
/// `classify` reports the de Sitter regime.
pub fn desitter_constraint_check(
    d: &WeierstrassData,
    tol: f64,
) -> Result<DesitterConstraintReport> {
    let p = &d.params;
    match classify(p) {
        SpaceForm::DeSitter { .. } => {}
        other => {
            return Err(Error::WrongRegime(format!(
                "de Sitter constraint check requires mu1 = mu2 != 0, got {}",
                other.label()
            )))
        }
    }
    let grid = &d.grid;
    let q_v = deriv_v(&d.q, grid.dv);
    let mut a_sup: f64 = 0.0;
    let mut b_sup: f64 = 0.0;
    let mut id_sup: f64 = 0.0;
    let mut feasible = 0usize;
    let mut constrained = 0usize;
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            let (q, r) = (*d.q.get(i, j), *d.r.get(i, j));
            let ca = p.mu2 * q * r + p.mu1 / 2.0 * (1.0 - r * r);
            let cb = p.mu2 * q * r + p.mu1 / 2.0 * (1.0 - q * q);
            a_sup = a_sup.max(ca.abs());
            b_sup = b_sup.max(cb.abs());
            // (cb - ca) = (mu1/2)(r^2 - q^2), so ca - cb = (mu1/2)(q^2 - r^2)
            id_sup = id_sup.max(((ca - cb) - p.mu1 / 2.0 * (q * q - r * r)).abs());
            let both = ca.abs() < tol && cb.abs() < tol;
            if both {
                constrained += 1;
                let regular = check_node_regularity(q, 1.0, r, 1.0, i, j).is_ok();
                let anti = (q + r).abs() < tol;
                // q = -r constant would need q_v = 0, but the evolution
                // equation gives q_v = -c (1 - q^2) q under f = g = 1.
                let qdot_expected = -p.mu1 * (1.0 - q * q) * q;
                let consistent = (q_v.get(i, j) - qdot_expected).abs() < tol;
                if regular && anti && consistent && q.abs() > tol {
                    feasible += 1;
                }
            }
        }
    }
    Ok(DesitterConstraintReport {
        constraint_a_sup: a_sup,
        constraint_b_sup: b_sup,
        subtraction_identity_sup: id_sup,
        feasible_anti_nodes: feasible,
        constrained_nodes: constrained,
        tol,
    })
}

/// The constant `q = r = A` closed-form surface of the `f = g = 1`
/// normalization in `G(c, c)`; it satisfies the pointwise constraints at
/// `A^2 = 1/3` (for `c = 1`) but is not conformal.
pub fn desitter_constant_data_surface(a: f64, c: f64, grid: NullGrid) -> ImmersionPatch {
    let params = ModelParams::new(c, c);
    ImmersionPatch::from_fn(grid, params, |u, v| {
        let x0 = 0.5 * (1.0 + a * a) * (u - v);
        let w = (0.5 * c * (1.0 + a * a) * (u - v)).exp();
        GroupElement::new(x0, -0.5 * w * (1.0 - a * a) * (u + v), -a * w * (u + v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spinor_basic_values() {
        let xi = xi_of(0.0, 1.0);
        let eta = eta_of(0.0, 1.0);
        assert_eq!(xi, [0.5, -0.5, 0.0]);
        assert_eq!(eta, [-0.5, -0.5, 0.0]);
    }

    #[test]
    fn spinor_roundtrip_and_null() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let q: f64 = rng.gen_range(-0.9..0.9);
            let f: f64 = loop {
                let f: f64 = rng.gen_range(-2.0..2.0);
                if f.abs() > 0.1 {
                    break f;
                }
            };
            let r: f64 = rng.gen_range(-0.9..0.9);
            let g: f64 = loop {
                let g: f64 = rng.gen_range(-2.0..2.0);
                if g.abs() > 0.1 {
                    break g;
                }
            };
            let xi = xi_of(q, f);
            let eta = eta_of(r, g);
            // null conditions hold identically
            assert_abs_diff_eq!(
                -xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2],
                0.0,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                -eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2],
                0.0,
                epsilon = 1e-14
            );
            let (q2, f2, r2, g2) = data_from_spinor(&xi, &eta);
            assert_abs_diff_eq!(q2, q, epsilon = 1e-14);
            assert_abs_diff_eq!(f2, f, epsilon = 1e-14);
            assert_abs_diff_eq!(r2, r, epsilon = 1e-14);
            assert_abs_diff_eq!(g2, g, epsilon = 1e-14);
        }
    }

    #[test]
    fn metric_identity() {
        // 2(-xi0 eta0 + xi1 eta1 + xi2 eta2) = (1 + qr)^2 f g
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let q: f64 = rng.gen_range(-2.0..2.0);
            let f: f64 = rng.gen_range(-2.0..2.0);
            let r: f64 = rng.gen_range(-2.0..2.0);
            let g: f64 = rng.gen_range(-2.0..2.0);
            let xi = xi_of(q, f);
            let eta = eta_of(r, g);
            let lhs = 2.0 * (-xi[0] * eta[0] + xi[1] * eta[1] + xi[2] * eta[2]);
            let rhs = (1.0 + q * r).powi(2) * f * g;
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn minkowski_rhs_vanish() {
        let grid = NullGrid::from_extent(0.0, 0.0, 1.0, 1.0, 17, 17).unwrap();
        let b = BoundaryData::from_fns(
            &grid,
            |u| 0.3 * u.sin(),
            |u| 1.0 + 0.1 * u,
            |v| 0.2 * v,
            |v| 1.0 - 0.1 * v,
        );
        let d = goursat_solve(
            &b,
            &ModelParams::new(0.0, 0.0),
            &grid,
            &SolverConfig::default(),
        )
        .unwrap();
        // q, f constant in v; r, g constant in u
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                assert_abs_diff_eq!(*d.q.get(i, j), *d.q.get(i, 0), epsilon = 1e-15);
                assert_abs_diff_eq!(*d.f.get(i, j), *d.f.get(i, 0), epsilon = 1e-15);
                assert_abs_diff_eq!(*d.r.get(i, j), *d.r.get(0, j), epsilon = 1e-15);
                assert_abs_diff_eq!(*d.g.get(i, j), *d.g.get(0, j), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn desitter_trivial_gauss_map_solution() {
        // mu1 = mu2 = 1, q = r = 0 on the edges: q, r stay identically
        // zero while f_v = fg/2, g_u = -fg/2.
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 65, 65).unwrap();
        let b = BoundaryData::from_fns(&grid, |_| 0.0, |_| 1.0, |_| 0.0, |_| 1.0);
        let p = ModelParams::new(1.0, 1.0);
        let d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        for (_, _, &q) in d.q.enumerate() {
            assert_abs_diff_eq!(q, 0.0, epsilon = 1e-14);
        }
        for (_, _, &r) in d.r.enumerate() {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-14);
        }
        for (_, _, &f) in d.f.enumerate() {
            assert!(f > 0.0);
        }
        // compare against a fine-grid reference at shared nodes
        let fine = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 257, 257).unwrap();
        let bf = BoundaryData::from_fns(&fine, |_| 0.0, |_| 1.0, |_| 0.0, |_| 1.0);
        let df = goursat_solve(&bf, &p, &fine, &SolverConfig::default()).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                max_err = max_err.max((d.f.get(i, j) - df.f.get(4 * i, 4 * j)).abs());
                max_err = max_err.max((d.g.get(i, j) - df.g.get(4 * i, 4 * j)).abs());
            }
        }
        let h = grid.du;
        assert!(
            max_err < 5.0 * h * h,
            "max_err = {max_err}, h^2 = {}",
            h * h
        );
    }

    #[test]
    fn solver_aborts_on_regularity_violation() {
        let grid = NullGrid::from_extent(0.0, 0.0, 1.0, 1.0, 17, 17).unwrap();
        let b = BoundaryData::from_fns(&grid, |_| 1.0, |_| 1.0, |_| 0.0, |_| 1.0);
        let err = goursat_solve(
            &b,
            &ModelParams::new(1.0, 1.0),
            &grid,
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Regularity { .. }), "{err}");
        assert!(err.to_string().contains("q^2 = 1"));
    }

    #[test]
    fn minkowski_integration_closed_form() {
        // q = r = 0, f = g = 1: phi(u, v) = ((u-v)/2, -(u+v)/2, 0)
        let grid = NullGrid::from_extent(0.0, 0.0, 1.0, 1.0, 17, 17).unwrap();
        let d = WeierstrassData::from_fns(
            grid,
            ModelParams::new(0.0, 0.0),
            |_, _| 0.0,
            |_, _| 1.0,
            |_, _| 0.0,
            |_, _| 1.0,
        );
        let patch = integrate_surface(&d).unwrap();
        for (i, j, pt) in patch.points.enumerate() {
            let (u, v) = (grid.u(i), grid.v(j));
            assert_abs_diff_eq!(pt.x0, (u - v) / 2.0, epsilon = 1e-13);
            assert_abs_diff_eq!(pt.x1, -(u + v) / 2.0, epsilon = 1e-13);
            assert_abs_diff_eq!(pt.x2, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn minkowski_polynomial_quadratures() {
        // q = u, r = v, f = g = 1 against the exact closed-form quadratures.
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 33, 33).unwrap();
        let d = WeierstrassData::from_fns(
            grid,
            ModelParams::new(0.0, 0.0),
            |u, _| u,
            |_, _| 1.0,
            |_, v| v,
            |_, _| 1.0,
        );
        let patch = integrate_surface(&d).unwrap();
        for (i, j, pt) in patch.points.enumerate() {
            let (u, v) = (grid.u(i), grid.v(j));
            let x0 = 0.5 * (u + u.powi(3) / 3.0) - 0.5 * (v + v.powi(3) / 3.0);
            let x1 = -0.5 * (u - u.powi(3) / 3.0) - 0.5 * (v - v.powi(3) / 3.0);
            let x2 = -(u * u / 2.0 + v * v / 2.0);
            assert_abs_diff_eq!(pt.x0, x0, epsilon = 1e-10);
            assert_abs_diff_eq!(pt.x1, x1, epsilon = 1e-10);
            assert_abs_diff_eq!(pt.x2, x2, epsilon = 1e-10);
        }
    }

    #[test]
    fn desitter_trivial_solution_is_planar_in_x2() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 65, 65).unwrap();
        let b = BoundaryData::from_fns(&grid, |_| 0.0, |_| 1.0, |_| 0.0, |_| 1.0);
        let p = ModelParams::new(1.0, 1.0);
        let d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        let patch = integrate_surface(&d).unwrap();
        for (_, _, pt) in patch.points.enumerate() {
            assert_abs_diff_eq!(pt.x2, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exactness_zero_for_constant_minkowski_data() {
        let grid = NullGrid::from_extent(0.0, 0.0, 1.0, 1.0, 9, 9).unwrap();
        let d = WeierstrassData::from_fns(
            grid,
            ModelParams::new(0.0, 0.0),
            |_, _| 0.3,
            |_, _| 1.0,
            |_, _| -0.2,
            |_, _| 1.5,
        );
        let res = exactness_residual(&d).unwrap();
        assert!(res.sup_interior(0) < 1e-13);
    }

    #[test]
    fn exactness_spikes_on_corrupted_node() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 33, 33).unwrap();
        let b = BoundaryData::from_fns(
            &grid,
            |u| 0.3 * (2.0 * u).sin(),
            |_| 1.0,
            |v| 0.3 * (2.0 * v).cos(),
            |_| 1.0,
        );
        let p = ModelParams::new(1.0, 2.0);
        let mut d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        let clean = exactness_residual(&d).unwrap();
        let before = *clean.get(16, 16);
        *d.f.get_mut(16, 16) += 0.1;
        let res = exactness_residual(&d).unwrap();
        assert!(*res.get(16, 16) > 0.01, "residual = {}", res.get(16, 16));
        assert!(*res.get(16, 16) > 100.0 * before.max(1e-6));
    }

    #[test]
    fn path_independence_on_solved_data() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 65, 65).unwrap();
        let b = BoundaryData::from_fns(
            &grid,
            |u| 0.3 * (2.0 * u).sin(),
            |u| 1.0 + 0.1 * u,
            |v| 0.3 * (2.0 * v).cos(),
            |v| 1.0 - 0.1 * v,
        );
        let p = ModelParams::new(1.0, -1.0);
        let d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        let a = integrate_surface_path(&d, PathOrder::UThenV).unwrap();
        let c = integrate_surface_path(&d, PathOrder::VThenU).unwrap();
        let mut max_diff: f64 = 0.0;
        for (i, j, pa) in a.points.enumerate() {
            let pc = c.points.get(i, j);
            max_diff = max_diff
                .max((pa.x0 - pc.x0).abs())
                .max((pa.x1 - pc.x1).abs())
                .max((pa.x2 - pc.x2).abs());
        }
        let h = grid.du;
        assert!(max_diff < 10.0 * h * h, "max_diff = {max_diff}");
    }

    #[test]
    fn desitter_q_cannot_be_lorentz_holomorphic() {
        // If max |dq/dv| < h^2 on solved de Sitter data then the factor
        // (r - q)(1 + qr) g must vanish somewhere (q cannot be Lorentz
        // holomorphic with nonconstant data).
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 65, 65).unwrap();
        let b = BoundaryData::from_fns(
            &grid,
            |u| 0.3 * (3.0 * u).sin(),
            |_| 1.0,
            |v| 0.2 * (2.0 * v).cos(),
            |_| 1.0,
        );
        let p = ModelParams::new(1.0, 1.0);
        let d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        let q_v = deriv_v(&d.q, grid.dv);
        let max_qv = q_v.sup_interior(2);
        let h = grid.du;
        if max_qv < h * h {
            let mut min_factor = f64::INFINITY;
            for (i, j, &q) in d.q.enumerate() {
                let r = *d.r.get(i, j);
                let g = *d.g.get(i, j);
                min_factor = min_factor.min(((r - q) * (1.0 + q * r) * g).abs());
            }
            assert!(min_factor < 1e-6);
        } else {
            // generic data: q_v is genuinely nonzero, which is the
            // expected branch
            assert!(max_qv > h * h);
        }
    }

    #[test]
    fn desitter_constraint_subtraction_identity() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 17, 17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = WeierstrassData::from_fns(
            grid,
            ModelParams::new(1.0, 1.0),
            |_, _| rng.gen_range(-0.9..0.9),
            |_, _| 1.0,
            |_, _| 0.4,
            |_, _| 1.0,
        );
        let rep = desitter_constraint_check(&d, 1e-6).unwrap();
        assert!(rep.subtraction_identity_sup < 1e-12);
    }

    #[test]
    fn desitter_constraint_rejects_wrong_regime() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 9, 9).unwrap();
        let d = WeierstrassData::from_fns(
            grid,
            ModelParams::new(1.0, 2.0),
            |_, _| 0.0,
            |_, _| 1.0,
            |_, _| 0.0,
            |_, _| 1.0,
        );
        assert!(matches!(
            desitter_constraint_check(&d, 1e-6),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn generic_solved_data_fail_normalization_constraints() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 33, 33).unwrap();
        let b = BoundaryData::from_fns(
            &grid,
            |u| 0.3 * (3.0 * u).sin() + 0.1,
            |u| 1.0 + 0.2 * u,
            |v| 0.3 * (2.0 * v).cos(),
            |v| 1.0 + 0.1 * v,
        );
        let p = ModelParams::new(1.0, 1.0);
        let d = goursat_solve(&b, &p, &grid, &SolverConfig::default()).unwrap();
        let rep = desitter_constraint_check(&d, 1e-3).unwrap();
        assert!(rep.constraint_a_sup > 0.1);
        assert!(rep.constrained_nodes == 0);
        assert_eq!(rep.feasible_anti_nodes, 0);
    }

    #[test]
    fn constant_data_closed_form_not_conformal() {
        // q = r = A with A^2 = 1/3, c = 1: pointwise constraints hold but
        // the closed-form surface is not conformal.
        let a = (1.0f64 / 3.0).sqrt();
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 33, 33).unwrap();
        let patch = desitter_constant_data_surface(a, 1.0, grid);
        let ff = crate::surface::fundamental_form(&patch).unwrap();
        assert!(ff.conf_residual.sup_interior(2) > 0.1);
    }

    #[test]
    fn generate_minkowski_variable_restriction() {
        let grid = NullGrid::from_extent(0.0, 0.0, 0.5, 0.5, 9, 9).unwrap();
        let q = crate::expr::parse_expression("u").unwrap();
        let f = crate::expr::parse_expression("1").unwrap();
        let r = crate::expr::parse_expression("v").unwrap();
        let g = crate::expr::parse_expression("1").unwrap();
        assert!(generate_minkowski(&q, &f, &r, &g, &grid).is_ok());
        let bad_q = crate::expr::parse_expression("v").unwrap();
        assert!(matches!(
            generate_minkowski(&bad_q, &f, &r, &g, &grid),
            Err(Error::WrongVariable { .. })
        ));
    }
}
