//! The solvable Lie group `G(mu1, mu2)` and its left-invariant geometry.
//!
//! `G(mu1, mu2)` is `R^3(x0, x1, x2)` with multiplication
//! `(a . b) = (a0 + b0, a1 + e^{mu1 a0} b1, a2 + e^{mu2 a0} b2)` and the
//! left-invariant Lorentzian metric
//! `-(dx0)^2 + e^{-2 mu1 x0} (dx1)^2 + e^{-2 mu2 x0} (dx2)^2`.
//!
//! The Lie algebra carries the orthonormal basis `{E0, E1, E2}` with
//! signature `(-, +, +)` and commutators `[E0,E1] = mu1 E1`,
//! `[E2,E0] = -mu2 E2`, `[E1,E2] = 0`. The left-translated frame is
//! `e0 = d/dx0`, `e1 = e^{mu1 x0} d/dx1`, `e2 = e^{mu2 x0} d/dx2`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters below this magnitude are treated as exactly zero when
/// classifying the ambient space (floating-point parameter entry).
pub const CLASSIFY_EPS: f64 = 1e-12;

/// The pair `(mu1, mu2)` selecting a member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu1: f64,
    pub mu2: f64,
}

impl ModelParams {
    pub fn new(mu1: f64, mu2: f64) -> Self {
        ModelParams { mu1, mu2 }
    }
}

/// A point of `G(mu1, mu2)` in the global coordinates; every real triple
/// is a group element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl GroupElement {
    pub fn new(x0: f64, x1: f64, x2: f64) -> Self {
        GroupElement { x0, x1, x2 }
    }

    pub fn identity() -> Self {
        GroupElement::new(0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite()
    }
}

/// A vector of the Lie algebra in the orthonormal basis `{E0, E1, E2}`.
/// The inner product has signature `(-, +, +)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraVector {
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

impl AlgebraVector {
    pub fn new(y0: f64, y1: f64, y2: f64) -> Self {
        AlgebraVector { y0, y1, y2 }
    }

    pub fn zero() -> Self {
        AlgebraVector::new(0.0, 0.0, 0.0)
    }

    /// Basis vector `E_i`, `i` in `{0, 1, 2}`.
    pub fn basis(i: usize) -> Self {
        match i {
            0 => AlgebraVector::new(1.0, 0.0, 0.0),
            1 => AlgebraVector::new(0.0, 1.0, 0.0),
            2 => AlgebraVector::new(0.0, 0.0, 1.0),
            _ => panic!("basis index out of range: {i}"),
        }
    }

    pub fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.y0,
            1 => self.y1,
            2 => self.y2,
            _ => panic!("component index out of range: {i}"),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraVector::new(s * self.y0, s * self.y1, s * self.y2)
    }

    pub fn add(&self, other: &AlgebraVector) -> Self {
        AlgebraVector::new(self.y0 + other.y0, self.y1 + other.y1, self.y2 + other.y2)
    }

    pub fn sub(&self, other: &AlgebraVector) -> Self {
        AlgebraVector::new(self.y0 - other.y0, self.y1 - other.y1, self.y2 - other.y2)
    }

    /// Lorentzian inner product `<V, W> = -v0 w0 + v1 w1 + v2 w2`.
    pub fn dot(&self, other: &AlgebraVector) -> f64 {
        -self.y0 * other.y0 + self.y1 * other.y1 + self.y2 * other.y2
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.y0.abs().max(self.y1.abs()).max(self.y2.abs())
    }

    /// Lorentzian cross product: the unique vector with
    /// `<a x_L b, c> = det(a, b, c)` for all `c`; equals the Euclidean
    /// cross product with the time component negated. It is orthogonal to
    /// both factors in the `(-, +, +)` inner product.
    pub fn cross_lorentz(&self, other: &AlgebraVector) -> AlgebraVector {
        let c0 = self.y1 * other.y2 - self.y2 * other.y1;
        let c1 = self.y2 * other.y0 - self.y0 * other.y2;
        let c2 = self.y0 * other.y1 - self.y1 * other.y0;
        AlgebraVector::new(-c0, c1, c2)
    }
}

/// A point of the de Sitter hyperquadric
/// `-(u0)^2 + (u1)^2 + (u2)^2 + (u3)^2 = 1/c^2` in Minkowski 4-space,
/// restricted to the chart region `c (u0 + u1) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatChartPoint {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl FlatChartPoint {
    /// `-(u0)^2 + (u1)^2 + (u2)^2 + (u3)^2`; equals `1/c^2` on the quadric.
    pub fn quadric_value(&self) -> f64 {
        -self.u0 * self.u0 + self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3
    }
}

/// Group multiplication.
pub fn multiply(a: &GroupElement, b: &GroupElement, p: &ModelParams) -> GroupElement {
    GroupElement::new(
        a.x0 + b.x0,
        a.x1 + (p.mu1 * a.x0).exp() * b.x1,
        a.x2 + (p.mu2 * a.x0).exp() * b.x2,
    )
}

/// Group inverse: `(-x0, -e^{-mu1 x0} x1, -e^{-mu2 x0} x2)`.
pub fn inverse(a: &GroupElement, p: &ModelParams) -> GroupElement {
    GroupElement::new(
        -a.x0,
        -(-p.mu1 * a.x0).exp() * a.x1,
        -(-p.mu2 * a.x0).exp() * a.x2,
    )
}

/// Metric on coordinate-frame vectors at `base`:
/// `-V0 W0 + e^{-2 mu1 x0} V1 W1 + e^{-2 mu2 x0} V2 W2`.
pub fn metric_eval(base: &GroupElement, v: &[f64; 3], w: &[f64; 3], p: &ModelParams) -> f64 {
    -v[0] * w[0]
        + (-2.0 * p.mu1 * base.x0).exp() * v[1] * w[1]
        + (-2.0 * p.mu2 * base.x0).exp() * v[2] * w[2]
}

/// Lie bracket in the `{E0, E1, E2}` basis:
/// `[X, Y] = (0, mu1 (x0 y1 - y0 x1), mu2 (x0 y2 - y0 x2))`.
pub fn bracket(x: &AlgebraVector, y: &AlgebraVector, p: &ModelParams) -> AlgebraVector {
    AlgebraVector::new(
        0.0,
        p.mu1 * (x.y0 * y.y1 - y.y0 * x.y1),
        p.mu2 * (x.y0 * y.y2 - y.y0 * x.y2),
    )
}

/// The symmetric bilinear operator
/// `U(X, Y) = (ad(X)* Y + ad(Y)* X) / 2`, extended bilinearly from the
/// basis table `U(E0,E0) = 0`, `U(E1,E1) = mu1 E0`, `U(E2,E2) = mu2 E0`,
/// `U(E0,E1) = (mu1/2) E1`, `U(E1,E2) = 0`, `U(E2,E0) = (mu2/2) E2`.
pub fn u_operator(x: &AlgebraVector, y: &AlgebraVector, p: &ModelParams) -> AlgebraVector {
    AlgebraVector::new(
        p.mu1 * x.y1 * y.y1 + p.mu2 * x.y2 * y.y2,
        p.mu1 / 2.0 * (x.y0 * y.y1 + x.y1 * y.y0),
        p.mu2 / 2.0 * (x.y0 * y.y2 + x.y2 * y.y0),
    )
}

/// Levi-Civita connection on the left-invariant frame, `nabla_{e_i} e_j`.
///
/// Derived from the Koszul formula with the commutators above:
/// `nabla_{e1} e1 = -mu1 e0`, `nabla_{e2} e2 = -mu2 e0`,
/// `nabla_{e1} e0 = -mu1 e1`, `nabla_{e2} e0 = -mu2 e2`, all other entries
/// zero. Torsion-freeness against `bracket` and metric compatibility hold
/// as identities.
pub fn frame_connection(i: usize, j: usize, p: &ModelParams) -> AlgebraVector {
    match (i, j) {
        (1, 0) => AlgebraVector::new(0.0, -p.mu1, 0.0),
        (1, 1) => AlgebraVector::new(-p.mu1, 0.0, 0.0),
        (2, 0) => AlgebraVector::new(0.0, 0.0, -p.mu2),
        (2, 2) => AlgebraVector::new(-p.mu2, 0.0, 0.0),
        (0, 0) | (0, 1) | (0, 2) | (1, 2) | (2, 1) => AlgebraVector::zero(),
        _ => panic!("frame index out of range: ({i},{j})"),
    }
}

/// Bilinear extension of the connection table:
/// `Gamma(X, Y) = sum_{j,k} x_j y_k nabla_{e_j} e_k`.
pub fn connection_bilinear(x: &AlgebraVector, y: &AlgebraVector, p: &ModelParams) -> AlgebraVector {
    let mut acc = AlgebraVector::zero();
    for j in 0..3 {
        let xj = x.component(j);
        if xj == 0.0 {
            continue;
        }
        for k in 0..3 {
            let yk = y.component(k);
            if yk == 0.0 {
                continue;
            }
            acc = acc.add(&frame_connection(j, k, p).scale(xj * yk));
        }
    }
    acc
}

/// Sectional curvature of the frame plane `(i, j)`:
/// `K(e0,e1) = mu1^2`, `K(e1,e2) = mu1 mu2`, `K(e0,e2) = mu2^2`.
pub fn sectional_curvature(plane: (usize, usize), p: &ModelParams) -> f64 {
    let key = (plane.0.min(plane.1), plane.0.max(plane.1));
    match key {
        (0, 1) => p.mu1 * p.mu1,
        (1, 2) => p.mu1 * p.mu2,
        (0, 2) => p.mu2 * p.mu2,
        _ => panic!("plane index out of range: {plane:?}"),
    }
}

/// Ambient space classification of `G(mu1, mu2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpaceForm {
    /// `G(0,0)`: Minkowski 3-space.
    Minkowski,
    /// `G(c,c)`, `c != 0`: flat chart of de Sitter 3-space of curvature `c^2`.
    DeSitter { curvature: f64 },
    /// `G(0,c)` or `G(c,0)`, `c != 0`: product `E^1 x R^2_1(c^2)`.
    Product { curvature: f64 },
    /// `G(c,-c)`, `c != 0`: Minkowski motion group `E(1,1)`.
    MinkowskiMotion,
    /// Anything else.
    Generic,
}

impl SpaceForm {
    pub fn has_constant_curvature(&self) -> bool {
        matches!(self, SpaceForm::Minkowski | SpaceForm::DeSitter { .. })
    }

    pub fn label(&self) -> String {
        match self {
            SpaceForm::Minkowski => "Minkowski".to_string(),
            SpaceForm::DeSitter { curvature } => format!("deSitter({curvature})"),
            SpaceForm::Product { curvature } => format!("E1xR21({curvature})"),
            SpaceForm::MinkowskiMotion => "E(1,1)".to_string(),
            SpaceForm::Generic => "generic".to_string(),
        }
    }
}

/// Classify `(mu1, mu2)`, treating `|mu| < CLASSIFY_EPS` as zero.
pub fn classify(p: &ModelParams) -> SpaceForm {
    let snap = |m: f64| if m.abs() < CLASSIFY_EPS { 0.0 } else { m };
    let (m1, m2) = (snap(p.mu1), snap(p.mu2));
    if m1 == 0.0 && m2 == 0.0 {
        SpaceForm::Minkowski
    } else if (m1 - m2).abs() < CLASSIFY_EPS {
        SpaceForm::DeSitter { curvature: m1 * m1 }
    } else if m1 == 0.0 || m2 == 0.0 {
        let c = if m1 == 0.0 { m2 } else { m1 };
        SpaceForm::Product { curvature: c * c }
    } else if (m1 + m2).abs() < CLASSIFY_EPS {
        SpaceForm::MinkowskiMotion
    } else {
        SpaceForm::Generic
    }
}

/// Embed a point of `G(c, c)` into the de Sitter hyperquadric in `E^4_1`.
///
/// The flat chart of the hyperquadric carries `e^{+2 c x0}` on the spatial
/// part while `G(c, c)` carries `e^{-2 c x0}`; the embedding composes with
/// the isometry `x0 -> -x0` so that it lands isometrically on the chart
/// region `c (u0 + u1) > 0`.
pub fn flat_chart_embed(g: &GroupElement, c: f64) -> Result<FlatChartPoint> {
    if c == 0.0 {
        return Err(Error::ZeroCurvatureChart);
    }
    let y0 = -g.x0; // chart time coordinate
    let s = (c * y0).exp() / c; // s = u0 + u1, with c*s = e^{c y0} > 0
    let u2 = g.x1 * c * s;
    let u3 = g.x2 * c * s;
    let diff = (1.0 / (c * c) - u2 * u2 - u3 * u3) / s; // u1 - u0
    Ok(FlatChartPoint {
        u0: (s - diff) / 2.0,
        u1: (s + diff) / 2.0,
        u2,
        u3,
    })
}
