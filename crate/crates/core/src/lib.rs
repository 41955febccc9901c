//! Minimal timelike surfaces in the two-parameter family of homogeneous
//! Lorentzian 3-manifolds `G(mu1, mu2)`.
//!
//! The family carries the left-invariant metric
//! `-(dx0)^2 + e^{-2 mu1 x0} (dx1)^2 + e^{-2 mu2 x0} (dx2)^2` on `R^3` and
//! contains Minkowski 3-space, the flat chart of de Sitter 3-space, the
//! product `E^1 x R^2_1(c^2)`, and the Minkowski motion group `E(1,1)`.
//!
//! The crate builds minimal timelike (Lorentz) surfaces from characteristic
//! boundary data `(q, f, r, g)` on a null-coordinate rectangle, integrates
//! the representation formula into a sampled immersion, and verifies the
//! geometry numerically: conformality, vanishing mean curvature, the
//! harmonic-map system in coordinates, the induced-metric identity
//! `(1+qr)^2 f g`, and the harmonicity dichotomy of the projected normal
//! Gauss map.

// index-pair range loops are clearer for stencil code than iterators
#![allow(clippy::needless_range_loop)]
// negated comparisons also reject NaN, which `<=` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod gauss_map;
pub mod grid;
pub mod lie_group;
pub mod pipeline;
pub mod report;
pub mod stencil;
pub mod surface;
pub mod weierstrass;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
