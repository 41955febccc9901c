//! Sampled immersions into `G(mu1, mu2)` on null grids, their pullback
//! forms, fundamental form, mean curvature, and harmonicity residuals.
//!
//! All residuals are discrete: derivatives come from the stencils in
//! `stencil`, so a residual that vanishes in the continuum shows up here
//! as `O(h^2)` (solution error dominates the 4th-order stencils). Norms
//! should be taken on interior nodes (`margin >= 2`) to keep the one-sided
//! boundary stencils out of convergence measurements.

use crate::grid::{Grid2, NullGrid};
use crate::lie_group::{
    bracket, connection_bilinear, u_operator, AlgebraVector, GroupElement, ModelParams,
};
use crate::stencil::{deriv_u, deriv_v};
use crate::{Error, Result};

/// Relative tolerance below which `e^omega` marks a node degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-10;

/// A surface sampled on a null grid.
#[derive(Debug, Clone)]
pub struct ImmersionPatch {
    pub grid: NullGrid,
    pub points: Grid2<GroupElement>,
    pub params: ModelParams,
}

impl ImmersionPatch {
    pub fn new(grid: NullGrid, points: Grid2<GroupElement>, params: ModelParams) -> Self {
        assert_eq!((points.nu, points.nv), (grid.nu, grid.nv));
        ImmersionPatch {
            grid,
            points,
            params,
        }
    }

    /// Sample an analytic immersion `(u, v) -> G`.
    pub fn from_fn(
        grid: NullGrid,
        params: ModelParams,
        mut phi: impl FnMut(f64, f64) -> GroupElement,
    ) -> Self {
        let points = Grid2::from_fn(grid.nu, grid.nv, |i, j| phi(grid.u(i), grid.v(j)));
        ImmersionPatch {
            grid,
            points,
            params,
        }
    }

    pub fn coordinate_grid(&self, k: usize) -> Grid2<f64> {
        self.points.map(|p| match k {
            0 => p.x0,
            1 => p.x1,
            2 => p.x2,
            _ => panic!("coordinate index out of range: {k}"),
        })
    }
}

/// Pullback of the Maurer-Cartan form: `alpha' = phi^{-1} phi_u` and
/// `alpha'' = phi^{-1} phi_v`, per node, in the `{E0, E1, E2}` frame.
#[derive(Debug, Clone)]
pub struct PullbackForms {
    pub alpha_u: Grid2<AlgebraVector>,
    pub alpha_v: Grid2<AlgebraVector>,
}

fn vector_component(g: &Grid2<AlgebraVector>, k: usize) -> Grid2<f64> {
    g.map(|a| a.component(k))
}

/// Frame components of `phi^{-1} phi_u` and `phi^{-1} phi_v`:
/// `(x0_u, e^{-mu1 x0} x1_u, e^{-mu2 x0} x2_u)` and the `v` analogue.
pub fn pullback_frame(patch: &ImmersionPatch) -> Result<PullbackForms> {
    let g = &patch.grid;
    if g.nu < 3 || g.nv < 3 {
        return Err(Error::GridTooSmall {
            need: 3,
            got: g.nu.min(g.nv),
        });
    }
    let p = &patch.params;
    let x0 = patch.coordinate_grid(0);
    let x1 = patch.coordinate_grid(1);
    let x2 = patch.coordinate_grid(2);
    let d = [
        (deriv_u(&x0, g.du), deriv_v(&x0, g.dv)),
        (deriv_u(&x1, g.du), deriv_v(&x1, g.dv)),
        (deriv_u(&x2, g.du), deriv_v(&x2, g.dv)),
    ];
    let assemble = |pick: &dyn Fn(usize) -> Grid2<f64>| {
        let (c0, c1, c2) = (pick(0), pick(1), pick(2));
        Grid2::from_fn(g.nu, g.nv, |i, j| {
            let t = *x0.get(i, j);
            AlgebraVector::new(
                *c0.get(i, j),
                (-p.mu1 * t).exp() * c1.get(i, j),
                (-p.mu2 * t).exp() * c2.get(i, j),
            )
        })
    };
    let alpha_u = assemble(&|k| d[k].0.clone());
    let alpha_v = assemble(&|k| d[k].1.clone());
    Ok(PullbackForms { alpha_u, alpha_v })
}

/// First fundamental form data per node.
#[derive(Debug, Clone)]
pub struct FundamentalForm {
    /// `e^omega = 2 <alpha', alpha''>`.
    pub e_omega: Grid2<f64>,
    /// `max(|<alpha',alpha'>|, |<alpha'',alpha''>|)`.
    pub conf_residual: Grid2<f64>,
    /// False where `e^omega <= DEGENERACY_REL_TOL * max e^omega`.
    pub valid: Grid2<bool>,
}

pub fn fundamental_form(patch: &ImmersionPatch) -> Result<FundamentalForm> {
    let forms = pullback_frame(patch)?;
    Ok(fundamental_form_of(&forms))
}

pub fn fundamental_form_of(forms: &PullbackForms) -> FundamentalForm {
    let e_omega = forms.alpha_u.zip_map(&forms.alpha_v, |a, b| 2.0 * a.dot(b));
    let conf_residual = forms
        .alpha_u
        .zip_map(&forms.alpha_v, |a, b| a.dot(a).abs().max(b.dot(b).abs()));
    let max_e = e_omega.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let valid = e_omega.map(|&e| e > DEGENERACY_REL_TOL * max_e);
    FundamentalForm {
        e_omega,
        conf_residual,
        valid,
    }
}

/// Signed mean curvature per node; `valid` is false on degenerate nodes
/// (there `h` is set to zero rather than dividing by a vanishing metric).
#[derive(Debug, Clone)]
pub struct MeanCurvature {
    pub h: Grid2<f64>,
    pub valid: Grid2<bool>,
}

/// `H = (2 / e^omega) <nabla_{d/du} phi_v, N>`, with the unit spacelike
/// normal `N` oriented along the Lorentzian cross product
/// `alpha' x_L alpha''`.
pub fn mean_curvature(patch: &ImmersionPatch) -> Result<MeanCurvature> {
    let g = &patch.grid;
    let p = &patch.params;
    let forms = pullback_frame(patch)?;
    let ff = fundamental_form_of(&forms);

    // frame components of nabla_{d/du} phi_v = d/du(alpha'') + Gamma(alpha', alpha'')
    let dv_comps: Vec<Grid2<f64>> = (0..3)
        .map(|k| deriv_u(&vector_component(&forms.alpha_v, k), g.du))
        .collect();

    let mut h = Grid2::filled(g.nu, g.nv, 0.0);
    let mut valid = Grid2::filled(g.nu, g.nv, true);
    for i in 0..g.nu {
        for j in 0..g.nv {
            if !*ff.valid.get(i, j) {
                valid.set(i, j, false);
                continue;
            }
            let a = forms.alpha_u.get(i, j);
            let b = forms.alpha_v.get(i, j);
            let deriv = AlgebraVector::new(
                *dv_comps[0].get(i, j),
                *dv_comps[1].get(i, j),
                *dv_comps[2].get(i, j),
            );
            let cov = deriv.add(&connection_bilinear(a, b, p));
            let n_raw = a.cross_lorentz(b);
            let nsq = n_raw.norm_sq();
            if nsq <= 0.0 {
                valid.set(i, j, false);
                continue;
            }
            let n = n_raw.scale(1.0 / nsq.sqrt());
            h.set(i, j, 2.0 / ff.e_omega.get(i, j) * cov.dot(&n));
        }
    }
    Ok(MeanCurvature { h, valid })
}

/// Residuals of the coordinate harmonic-map system, per node:
/// `x0_uv - (mu1 x1_u x1_v e^{-2 mu1 x0} + mu2 x2_u x2_v e^{-2 mu2 x0})`,
/// `x1_uv - mu1 (x0_u x1_v + x0_v x1_u)`,
/// `x2_uv - mu2 (x0_u x2_v + x0_v x2_u)`.
pub fn harmonic_residual(patch: &ImmersionPatch) -> Result<Grid2<[f64; 3]>> {
    let g = &patch.grid;
    if g.nu < 3 || g.nv < 3 {
        return Err(Error::GridTooSmall {
            need: 3,
            got: g.nu.min(g.nv),
        });
    }
    let p = &patch.params;
    let x: Vec<Grid2<f64>> = (0..3).map(|k| patch.coordinate_grid(k)).collect();
    let xu: Vec<Grid2<f64>> = x.iter().map(|f| deriv_u(f, g.du)).collect();
    let xv: Vec<Grid2<f64>> = x.iter().map(|f| deriv_v(f, g.dv)).collect();
    let xuv: Vec<Grid2<f64>> = xu.iter().map(|f| deriv_v(f, g.dv)).collect();

    Ok(Grid2::from_fn(g.nu, g.nv, |i, j| {
        let t = *x[0].get(i, j);
        let r0 = xuv[0].get(i, j)
            - (p.mu1 * xu[1].get(i, j) * xv[1].get(i, j) * (-2.0 * p.mu1 * t).exp()
                + p.mu2 * xu[2].get(i, j) * xv[2].get(i, j) * (-2.0 * p.mu2 * t).exp());
        let r1 = xuv[1].get(i, j)
            - p.mu1 * (xu[0].get(i, j) * xv[1].get(i, j) + xv[0].get(i, j) * xu[1].get(i, j));
        let r2 = xuv[2].get(i, j)
            - p.mu2 * (xu[0].get(i, j) * xv[2].get(i, j) + xv[0].get(i, j) * xu[2].get(i, j));
        [r0, r1, r2]
    }))
}

/// Energy density `e(phi) = (-|phi^{-1} phi_t|^2 + |phi^{-1} phi_x|^2)/2`
/// with `phi_t = phi_u - phi_v`, `phi_x = phi_u + phi_v`. Algebraically
/// this equals `2 <alpha', alpha''>`, and is positive exactly where the
/// surface is timelike and nondegenerate.
pub fn energy_density(patch: &ImmersionPatch) -> Result<Grid2<f64>> {
    let forms = pullback_frame(patch)?;
    Ok(forms.alpha_u.zip_map(&forms.alpha_v, |a, b| {
        let dt = a.sub(b);
        let dx = a.add(b);
        (-dt.dot(&dt) + dx.dot(&dx)) / 2.0
    }))
}

/// Maurer-Cartan residual `alpha'_v - alpha''_u - [alpha', alpha'']`,
/// small (`O(h^2)`) for any genuine immersion regardless of harmonicity.
pub fn maurer_cartan_residual(
    forms: &PullbackForms,
    grid: &NullGrid,
    p: &ModelParams,
) -> Grid2<AlgebraVector> {
    let au_v: Vec<Grid2<f64>> = (0..3)
        .map(|k| deriv_v(&vector_component(&forms.alpha_u, k), grid.dv))
        .collect();
    let av_u: Vec<Grid2<f64>> = (0..3)
        .map(|k| deriv_u(&vector_component(&forms.alpha_v, k), grid.du))
        .collect();
    Grid2::from_fn(grid.nu, grid.nv, |i, j| {
        let duv = AlgebraVector::new(
            au_v[0].get(i, j) - av_u[0].get(i, j),
            au_v[1].get(i, j) - av_u[1].get(i, j),
            au_v[2].get(i, j) - av_u[2].get(i, j),
        );
        duv.sub(&bracket(
            forms.alpha_u.get(i, j),
            forms.alpha_v.get(i, j),
            p,
        ))
    })
}

/// Residual of the combined integrability + harmonicity equation
/// `alpha'_v = U(alpha', alpha'') + [alpha', alpha'']/2`.
pub fn combined_residual(
    forms: &PullbackForms,
    grid: &NullGrid,
    p: &ModelParams,
) -> Grid2<AlgebraVector> {
    let au_v: Vec<Grid2<f64>> = (0..3)
        .map(|k| deriv_v(&vector_component(&forms.alpha_u, k), grid.dv))
        .collect();
    Grid2::from_fn(grid.nu, grid.nv, |i, j| {
        let a = forms.alpha_u.get(i, j);
        let b = forms.alpha_v.get(i, j);
        AlgebraVector::new(*au_v[0].get(i, j), *au_v[1].get(i, j), *au_v[2].get(i, j))
            .sub(&u_operator(a, b, p))
            .sub(&bracket(a, b, p).scale(0.5))
    })
}

/// Max-abs reduction helpers for residual grids.
pub fn max_abs3(g: &Grid2<[f64; 3]>) -> Grid2<f64> {
    g.map(|r| r[0].abs().max(r[1].abs()).max(r[2].abs()))
}

pub fn max_abs_vec(g: &Grid2<AlgebraVector>) -> Grid2<f64> {
    g.map(|r| r.max_abs())
}
