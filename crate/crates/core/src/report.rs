//! Residual report emitted by verification runs.
//!
//! Schema (version 1): top-level `schema_version`, model parameters,
//! classification label, grid shape, harmonicity family, per-suite norms
//! under `suites` (sup, l2, excluded-node count, and — when a refinement
//! study ran — the measured convergence order), and the sup of the
//! non-harmonicity witness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grid::NullGrid;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Interior-node norms of one residual suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteNorms {
    pub sup: f64,
    pub l2: f64,
    /// Nodes excluded from the norms (singular loci, degenerate metric).
    pub excluded: usize,
    /// `log2(sup_coarse / sup_fine)` across the last grid halving;
    /// absent for single-level runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema_version: u32,
    pub mu1: f64,
    pub mu2: f64,
    /// Space-form label, e.g. "Minkowski", "deSitter(1)", "E(1,1)".
    pub classification: String,
    pub grid: NullGrid,
    pub refinement_levels: usize,
    /// "wave" | "equal" | "opposite" | "generic".
    pub harmonicity_family: String,
    /// Deterministically ordered map of suite name to norms.
    pub suites: BTreeMap<String, SuiteNorms>,
    /// Sup of the non-harmonicity cross term; identically zero for the
    /// harmonic families, order-one for generic parameters.
    pub witness_sup: f64,
    /// Node attaining the witness sup, if nonzero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_node: Option<(usize, usize)>,
}

/// Observed convergence order from sup norms on a grid and its
/// half-step refinement. `None` when either norm is too small to
/// measure (already at rounding level) or not finite.
pub fn convergence_order(coarse_sup: f64, fine_sup: f64) -> Option<f64> {
    if !coarse_sup.is_finite() || !fine_sup.is_finite() {
        return None;
    }
    if fine_sup < 1e-14 {
        // converged to rounding; report a saturated order
        return if coarse_sup < 1e-14 {
            None
        } else {
            Some(f64::INFINITY)
        };
    }
    Some((coarse_sup / fine_sup).log2())
}
