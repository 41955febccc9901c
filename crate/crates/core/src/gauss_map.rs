//! Normal Gauss map, stereographic projection, the projected map `(q, r)`,
//! and its harmonicity machinery.
//!
//! The left-translated unit normal is
//! `phi^{-1} N = [(q - r) E0 + (q + r) E1 + (qr - 1) E2] / (1 + qr)`,
//! valued in the unit de Sitter 2-sphere of the Lie algebra. Its
//! stereographic image from the north pole is `((q - r)/2, (q + r)/2)` in
//! `(t, x)` coordinates, i.e. the pair `(q, r)` in null coordinates.
//!
//! The projected map satisfies a pair of second-order equations for every
//! `(mu1, mu2)`; those are harmonic-map equations precisely when
//! `mu1^2 = mu2^2`, in which case the target is the Minkowski plane with
//! an off-diagonal metric `g_ab = 1/((1-a^2) b -+ a (1-b^2))`.

use serde::Serialize;

use crate::grid::Grid2;
use crate::lie_group::AlgebraVector;
use crate::stencil::{deriv_u, deriv_uv, deriv_v};
use crate::weierstrass::WeierstrassData;
use crate::{Error, Result};

/// Nodes within this distance of a vanishing denominator are excluded
/// from residual norms.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Unit spacelike vector in the Lie algebra, `<N, N> = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitNormal(pub AlgebraVector);

/// Image point of the projected normal Gauss map in the Minkowski plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub a: f64,
    pub b: f64,
}

/// Which harmonic-map target family applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TargetFamily {
    /// `mu1 = mu2 != 0`: denominator `(1-a^2) b - a (1-b^2)`.
    Equal,
    /// `mu1 = -mu2 != 0`: denominator `(1-a^2) b + a (1-b^2)`.
    Opposite,
}

impl TargetFamily {
    fn denominator(&self, a: f64, b: f64) -> f64 {
        match self {
            TargetFamily::Equal => (1.0 - a * a) * b - a * (1.0 - b * b),
            TargetFamily::Opposite => (1.0 - a * a) * b + a * (1.0 - b * b),
        }
    }
}

/// Off-diagonal target metric component `g_ab(a, b)`; `g_aa = g_bb = 0`.
pub fn target_metric(point: &ProjectedPoint, family: TargetFamily) -> Result<f64> {
    let den = family.denominator(point.a, point.b);
    if den.abs() < SINGULAR_TOL {
        return Err(Error::Regularity {
            i: 0,
            j: 0,
            what: "singular locus of the target metric".to_string(),
        });
    }
    Ok(1.0 / den)
}

/// Pointwise normal Gauss map value from `(q, r)`.
pub fn normal_at(q: f64, r: f64) -> Result<UnitNormal> {
    let den = 1.0 + q * r;
    if den.abs() < SINGULAR_TOL {
        return Err(Error::GaussMapPole);
    }
    Ok(UnitNormal(AlgebraVector::new(
        (q - r) / den,
        (q + r) / den,
        (q * r - 1.0) / den,
    )))
}

/// Per-node normal Gauss map of a data set.
pub fn normal_gauss_map(d: &WeierstrassData) -> Result<Grid2<UnitNormal>> {
    let mut out = Vec::with_capacity(d.grid.nu * d.grid.nv);
    for i in 0..d.grid.nu {
        for j in 0..d.grid.nv {
            out.push(normal_at(*d.q.get(i, j), *d.r.get(i, j))?);
        }
    }
    let mut it = out.into_iter();
    Ok(Grid2::from_fn(d.grid.nu, d.grid.nv, |_, _| {
        it.next().unwrap()
    }))
}

/// Stereographic projection from the north pole `E2`:
/// `(n0, n1, n2) -> (n0 / (1 - n2), n1 / (1 - n2))`.
pub fn stereographic_project(n: &UnitNormal) -> Result<ProjectedPoint> {
    let v = &n.0;
    if (1.0 - v.y2).abs() < SINGULAR_TOL {
        return Err(Error::ProjectionPole);
    }
    Ok(ProjectedPoint {
        a: v.y0 / (1.0 - v.y2),
        b: v.y1 / (1.0 - v.y2),
    })
}

/// Christoffel symbols `(Gamma^a_aa, Gamma^b_bb)` of the target metric.
pub fn target_christoffel(point: &ProjectedPoint, family: TargetFamily) -> Result<(f64, f64)> {
    let (a, b) = (point.a, point.b);
    let den = family.denominator(a, b);
    if den.abs() < SINGULAR_TOL {
        return Err(Error::Regularity {
            i: 0,
            j: 0,
            what: "singular locus of the target metric".to_string(),
        });
    }
    let (num_a, num_b) = match family {
        TargetFamily::Equal => (1.0 - b * b + 2.0 * a * b, -(1.0 - a * a) - 2.0 * a * b),
        TargetFamily::Opposite => (-(1.0 - b * b) + 2.0 * a * b, -(1.0 - a * a) + 2.0 * a * b),
    };
    Ok((num_a / den, num_b / den))
}

/// Residual pair of the general second-order system satisfied by the
/// projected map on solved data (any `(mu1, mu2)`); nodes with a
/// near-vanishing `mu`-denominator are excluded.
#[derive(Debug, Clone)]
pub struct PdeResidual {
    pub res_q: Grid2<f64>,
    pub res_r: Grid2<f64>,
    pub excluded: Grid2<bool>,
}

struct QrDerivs {
    q_u: Grid2<f64>,
    q_v: Grid2<f64>,
    r_u: Grid2<f64>,
    r_v: Grid2<f64>,
    q_uv: Grid2<f64>,
    r_uv: Grid2<f64>,
}

fn qr_derivs(d: &WeierstrassData) -> QrDerivs {
    let g = &d.grid;
    QrDerivs {
        q_u: deriv_u(&d.q, g.du),
        q_v: deriv_v(&d.q, g.dv),
        r_u: deriv_u(&d.r, g.du),
        r_v: deriv_v(&d.r, g.dv),
        q_uv: deriv_uv(&d.q, g.du, g.dv),
        r_uv: deriv_uv(&d.r, g.du, g.dv),
    }
}

/// Denominators of the general system:
/// `D1 = -mu1 q (1-r^2) + mu2 (1-q^2) r` and
/// `D2 = -mu1 (1-q^2) r + mu2 q (1-r^2)`.
fn mu_denominators(q: f64, r: f64, mu1: f64, mu2: f64) -> (f64, f64) {
    let d1 = -mu1 * q * (1.0 - r * r) + mu2 * (1.0 - q * q) * r;
    let d2 = -mu1 * (1.0 - q * q) * r + mu2 * q * (1.0 - r * r);
    (d1, d2)
}

/// Evaluate the general second-order equations for `(q, r)` on data.
pub fn gauss_pde_residual(d: &WeierstrassData) -> PdeResidual {
    let p = &d.params;
    let dv = qr_derivs(d);
    let g = &d.grid;
    let mut res_q = Grid2::filled(g.nu, g.nv, 0.0);
    let mut res_r = Grid2::filled(g.nu, g.nv, 0.0);
    let mut excluded = Grid2::filled(g.nu, g.nv, false);
    for i in 0..g.nu {
        for j in 0..g.nv {
            let (q, r) = (*d.q.get(i, j), *d.r.get(i, j));
            let (d1, d2) = mu_denominators(q, r, p.mu1, p.mu2);
            if d1.abs() < SINGULAR_TOL || d2.abs() < SINGULAR_TOL {
                excluded.set(i, j, true);
                continue;
            }
            let cross =
                (p.mu1 * p.mu1 - p.mu2 * p.mu2) / (d1 * d2) * dv.r_u.get(i, j) * dv.q_v.get(i, j);
            let rq = dv.q_uv.get(i, j)
                + (p.mu1 * (1.0 - r * r) + 2.0 * p.mu2 * q * r) / d1
                    * dv.q_u.get(i, j)
                    * dv.q_v.get(i, j)
                + cross * (1.0 - q * q) * (1.0 + r * r) * q;
            let rr = dv.r_uv.get(i, j)
                + (p.mu1 * (1.0 - q * q) + 2.0 * p.mu2 * q * r) / d2
                    * dv.r_u.get(i, j)
                    * dv.r_v.get(i, j)
                + cross * (1.0 + q * q) * (1.0 - r * r) * r;
            res_q.set(i, j, rq);
            res_r.set(i, j, rr);
        }
    }
    PdeResidual {
        res_q,
        res_r,
        excluded,
    }
}

/// Harmonicity family of `(mu1, mu2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HarmonicityFamily {
    /// `mu1 = mu2 = 0`: wave equation `q_uv = r_uv = 0`.
    Wave,
    /// `mu1 = mu2 != 0`.
    Equal,
    /// `mu1 = -mu2 != 0`.
    Opposite,
    /// `mu1^2 != mu2^2`: the projected map is not harmonic.
    Generic,
}

pub fn harmonicity_family(mu1: f64, mu2: f64) -> HarmonicityFamily {
    let eps = crate::lie_group::CLASSIFY_EPS;
    let snap = |m: f64| if m.abs() < eps { 0.0 } else { m };
    let (m1, m2) = (snap(mu1), snap(mu2));
    if m1 == 0.0 && m2 == 0.0 {
        HarmonicityFamily::Wave
    } else if (m1 - m2).abs() < eps {
        HarmonicityFamily::Equal
    } else if (m1 + m2).abs() < eps {
        HarmonicityFamily::Opposite
    } else {
        HarmonicityFamily::Generic
    }
}

/// Per-node tension-field components (up to the positive conformal factor)
/// for the harmonic families, or the general residual plus a quantitative
/// non-harmonicity witness otherwise.
#[derive(Debug, Clone)]
pub struct HarmonicityResidual {
    pub family: HarmonicityFamily,
    pub res_q: Grid2<f64>,
    pub res_r: Grid2<f64>,
    /// Magnitude of the `(mu1^2 - mu2^2)` cross term of the general
    /// system; identically zero for the harmonic families.
    pub witness: Grid2<f64>,
    pub excluded: Grid2<bool>,
}

pub fn harmonicity_residual(d: &WeierstrassData) -> HarmonicityResidual {
    let p = &d.params;
    let family = harmonicity_family(p.mu1, p.mu2);
    let dvs = qr_derivs(d);
    let g = &d.grid;
    let mut res_q = Grid2::filled(g.nu, g.nv, 0.0);
    let mut res_r = Grid2::filled(g.nu, g.nv, 0.0);
    let mut witness = Grid2::filled(g.nu, g.nv, 0.0);
    let mut excluded = Grid2::filled(g.nu, g.nv, false);
    for i in 0..g.nu {
        for j in 0..g.nv {
            let (q, r) = (*d.q.get(i, j), *d.r.get(i, j));
            match family {
                HarmonicityFamily::Wave => {
                    res_q.set(i, j, *dvs.q_uv.get(i, j));
                    res_r.set(i, j, *dvs.r_uv.get(i, j));
                }
                HarmonicityFamily::Equal | HarmonicityFamily::Opposite => {
                    let fam = if family == HarmonicityFamily::Equal {
                        TargetFamily::Equal
                    } else {
                        TargetFamily::Opposite
                    };
                    let point = ProjectedPoint { a: q, b: r };
                    match target_christoffel(&point, fam) {
                        Ok((gamma_q, gamma_r)) => {
                            res_q.set(
                                i,
                                j,
                                dvs.q_uv.get(i, j)
                                    + gamma_q * dvs.q_u.get(i, j) * dvs.q_v.get(i, j),
                            );
                            res_r.set(
                                i,
                                j,
                                dvs.r_uv.get(i, j)
                                    + gamma_r * dvs.r_u.get(i, j) * dvs.r_v.get(i, j),
                            );
                        }
                        Err(_) => excluded.set(i, j, true),
                    }
                }
                HarmonicityFamily::Generic => {
                    let (d1, d2) = mu_denominators(q, r, p.mu1, p.mu2);
                    if d1.abs() < SINGULAR_TOL || d2.abs() < SINGULAR_TOL {
                        excluded.set(i, j, true);
                        continue;
                    }
                    let cross = (p.mu1 * p.mu1 - p.mu2 * p.mu2) * (1.0 - q * q) * (1.0 + r * r) * q
                        / (d1 * d2)
                        * dvs.r_u.get(i, j)
                        * dvs.q_v.get(i, j);
                    witness.set(i, j, cross.abs());
                    let rq = dvs.q_uv.get(i, j)
                        + (p.mu1 * (1.0 - r * r) + 2.0 * p.mu2 * q * r) / d1
                            * dvs.q_u.get(i, j)
                            * dvs.q_v.get(i, j)
                        + cross;
                    let rr = dvs.r_uv.get(i, j)
                        + (p.mu1 * (1.0 - q * q) + 2.0 * p.mu2 * q * r) / d2
                            * dvs.r_u.get(i, j)
                            * dvs.r_v.get(i, j)
                        + (p.mu1 * p.mu1 - p.mu2 * p.mu2) * (1.0 + q * q) * (1.0 - r * r) * r
                            / (d1 * d2)
                            * dvs.r_u.get(i, j)
                            * dvs.q_v.get(i, j);
                    res_q.set(i, j, rq);
                    res_r.set(i, j, rr);
                }
            }
        }
    }
    HarmonicityResidual {
        family,
        res_q,
        res_r,
        witness,
        excluded,
    }
}
