//! Configuration, end-to-end pipeline orchestration, and mesh/report export.
//!
//! A run parses boundary expressions, samples them on the two
//! characteristic edges, solves the Goursat problem, integrates the
//! representation formula, and evaluates every residual suite. With
//! `refinement_levels > 1` the same data is re-solved on nested half-step
//! grids and per-suite convergence orders are reported.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::expr::{parse_expression, Expression};
use crate::gauss_map::{gauss_pde_residual, harmonicity_residual, HarmonicityFamily};
use crate::grid::{Grid2, NullGrid};
use crate::lie_group::{classify, ModelParams};
use crate::report::{convergence_order, ResidualReport, SuiteNorms, REPORT_SCHEMA_VERSION};
use crate::surface::{
    fundamental_form, harmonic_residual, max_abs3, mean_curvature, FundamentalForm, ImmersionPatch,
    MeanCurvature,
};
use crate::weierstrass::{
    exactness_residual, goursat_solve, integrate_surface, BoundaryData, SolverConfig,
    WeierstrassData,
};
use crate::{Error, Result};

/// Residual threshold for the harmonicity assertion.
pub const HARMONIC_ASSERT_TOL: f64 = 5e-3;

/// Interior margin (in nodes) on which residual norms are taken, keeping
/// boundary stencil truncation out of convergence studies.
pub const NORM_MARGIN: usize = 2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub u0: f64,
    pub v0: f64,
    pub u_extent: f64,
    pub v_extent: f64,
    pub nu: usize,
    pub nv: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySection {
    /// Expression in `u` for q on the edge v = v0.
    pub q: String,
    /// Expression in `u` for f on the edge v = v0.
    pub f: String,
    /// Expression in `v` for r on the edge u = u0.
    pub r: String,
    /// Expression in `v` for g on the edge u = u0.
    pub g: String,
}

fn default_order() -> usize {
    2
}

fn default_levels() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_levels")]
    pub refinement_levels: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            order: default_order(),
            refinement_levels: default_levels(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputsSection {
    #[serde(default = "default_mesh_path")]
    pub mesh_path: String,
    #[serde(default = "default_report_path")]
    pub report_path: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<MeshFormat>,
}

fn default_mesh_path() -> String {
    "mesh.obj".to_string()
}

fn default_report_path() -> String {
    "report.json".to_string()
}

fn default_formats() -> Vec<MeshFormat> {
    vec![MeshFormat::Obj]
}

impl Default for OutputsSection {
    fn default() -> Self {
        OutputsSection {
            mesh_path: default_mesh_path(),
            report_path: default_report_path(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub mu1: f64,
    pub mu2: f64,
    pub grid: GridSection,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub outputs: OutputsSection,
    /// Fail the run (exit code 1) when the projected normal Gauss map is
    /// not harmonic within tolerance.
    #[serde(default)]
    pub assert_harmonic: bool,
}

/// Parsed and variable-checked boundary expressions.
pub struct ParsedBoundary {
    pub q: Expression,
    pub f: Expression,
    pub r: Expression,
    pub g: Expression,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Validate invariants and parse the boundary expressions.
    pub fn validate(&self) -> Result<ParsedBoundary> {
        if self.grid.nu < 9 || self.grid.nv < 9 {
            return Err(Error::Config(format!(
                "grid must be at least 9x9, got {}x{}",
                self.grid.nu, self.grid.nv
            )));
        }
        if !(self.grid.u_extent > 0.0) || !(self.grid.v_extent > 0.0) {
            return Err(Error::Config(format!(
                "grid extents must be positive, got {} and {}",
                self.grid.u_extent, self.grid.v_extent
            )));
        }
        let parse = |name: &str, src: &str, allowed: char| -> Result<Expression> {
            let e = parse_expression(src)
                .map_err(|err| Error::Config(format!("boundary.{name}: {err}")))?;
            let other = if allowed == 'u' { 'v' } else { 'u' };
            if e.uses_variable(other) {
                return Err(Error::WrongVariable {
                    name: name.to_string(),
                    allowed,
                    found: other,
                });
            }
            Ok(e)
        };
        let parsed = ParsedBoundary {
            q: parse("q", &self.boundary.q, 'u')?,
            f: parse("f", &self.boundary.f, 'u')?,
            r: parse("r", &self.boundary.r, 'v')?,
            g: parse("g", &self.boundary.g, 'v')?,
        };
        // f, g must be nonzero at every edge sample point
        let grid = self.base_grid()?;
        for i in 0..grid.nu {
            let val = parsed.f.eval(grid.u(i), grid.v0).map_err(Error::Expr)?;
            if val.abs() < 1e-12 {
                return Err(Error::Config(format!(
                    "boundary.f vanishes at sample point u = {}",
                    grid.u(i)
                )));
            }
        }
        for j in 0..grid.nv {
            let val = parsed.g.eval(grid.u0, grid.v(j)).map_err(Error::Expr)?;
            if val.abs() < 1e-12 {
                return Err(Error::Config(format!(
                    "boundary.g vanishes at sample point v = {}",
                    grid.v(j)
                )));
            }
        }
        Ok(parsed)
    }

    pub fn base_grid(&self) -> Result<NullGrid> {
        NullGrid::from_extent(
            self.grid.u0,
            self.grid.v0,
            self.grid.u_extent,
            self.grid.v_extent,
            self.grid.nu,
            self.grid.nv,
        )
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.mu1, self.mu2)
    }
}

/// Everything a run produces: the finest-level patch with its pointwise
/// diagnostics, the solved data, and the residual report.
pub struct PipelineOutput {
    pub report: ResidualReport,
    pub patch: ImmersionPatch,
    pub data: WeierstrassData,
    pub fundamental: FundamentalForm,
    pub mean_curvature: MeanCurvature,
}

struct LevelNorms {
    suites: BTreeMap<String, SuiteNorms>,
    witness_sup: f64,
    witness_node: Option<(usize, usize)>,
    family: HarmonicityFamily,
}

fn norms_excluding(
    values: &Grid2<f64>,
    excluded: Option<&Grid2<bool>>,
    margin: usize,
) -> (f64, f64, usize) {
    let mut sup: f64 = 0.0;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut skipped = 0usize;
    for i in margin..values.nu.saturating_sub(margin) {
        for j in margin..values.nv.saturating_sub(margin) {
            if excluded.is_some_and(|e| *e.get(i, j)) {
                skipped += 1;
                continue;
            }
            let x = values.get(i, j).abs();
            sup = sup.max(x);
            sum += x * x;
            count += 1;
        }
    }
    let l2 = if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    };
    (sup, l2, skipped)
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn evaluate_level(
    d: &WeierstrassData,
) -> Result<(LevelNorms, ImmersionPatch, FundamentalForm, MeanCurvature)> {
    let patch = stage("integrate_surface", integrate_surface(d))?;
    let fund = stage("fundamental_form", fundamental_form(&patch))?;
    let mc = stage("mean_curvature", mean_curvature(&patch))?;
    let harm = stage("harmonic_residual", harmonic_residual(&patch))?;
    let exact = stage("exactness_residual", exactness_residual(d))?;
    let gauss = gauss_pde_residual(d);
    let harmy = harmonicity_residual(d);

    let mut suites = BTreeMap::new();
    let invalid = fund.valid.map(|v| !v);
    let (sup, l2, skipped) = norms_excluding(&fund.conf_residual, Some(&invalid), NORM_MARGIN);
    suites.insert(
        "conformality".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );
    let invalid_h = mc.valid.map(|v| !v);
    let (sup, l2, skipped) = norms_excluding(&mc.h, Some(&invalid_h), NORM_MARGIN);
    suites.insert(
        "mean_curvature".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );
    let (sup, l2, skipped) = norms_excluding(&max_abs3(&harm), None, NORM_MARGIN);
    suites.insert(
        "harmonic".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );
    let (sup, l2, skipped) = norms_excluding(&exact, None, NORM_MARGIN);
    suites.insert(
        "exactness".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );
    let gauss_max = gauss
        .res_q
        .zip_map(&gauss.res_r, |a, b| a.abs().max(b.abs()));
    let (sup, l2, skipped) = norms_excluding(&gauss_max, Some(&gauss.excluded), NORM_MARGIN);
    suites.insert(
        "gauss_pde".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );
    let harmy_max = harmy
        .res_q
        .zip_map(&harmy.res_r, |a, b| a.abs().max(b.abs()));
    let (sup, l2, skipped) = norms_excluding(&harmy_max, Some(&harmy.excluded), NORM_MARGIN);
    suites.insert(
        "harmonicity".to_string(),
        SuiteNorms {
            sup,
            l2,
            excluded: skipped,
            order: None,
        },
    );

    let mut witness_sup = 0.0;
    let mut witness_node = None;
    for i in NORM_MARGIN..harmy.witness.nu.saturating_sub(NORM_MARGIN) {
        for j in NORM_MARGIN..harmy.witness.nv.saturating_sub(NORM_MARGIN) {
            if *harmy.excluded.get(i, j) {
                continue;
            }
            let w = *harmy.witness.get(i, j);
            if w > witness_sup {
                witness_sup = w;
                witness_node = Some((i, j));
            }
        }
    }

    Ok((
        LevelNorms {
            suites,
            witness_sup,
            witness_node,
            family: harmy.family,
        },
        patch,
        fund,
        mc,
    ))
}

fn family_name(f: HarmonicityFamily) -> &'static str {
    match f {
        HarmonicityFamily::Wave => "wave",
        HarmonicityFamily::Equal => "equal",
        HarmonicityFamily::Opposite => "opposite",
        HarmonicityFamily::Generic => "generic",
    }
}

/// Run the full pipeline for a config. Deterministic: identical configs
/// produce bitwise-identical outputs.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput> {
    let parsed = cfg.validate()?;
    let params = cfg.params();
    let solver = SolverConfig {
        order: cfg.solver.order,
        corrector_iters: 2,
    };

    let mut grid = cfg.base_grid()?;
    let levels = cfg.solver.refinement_levels.max(1);
    let mut prev: Option<LevelNorms> = None;
    let mut finest: Option<(LevelNorms, ImmersionPatch, FundamentalForm, MeanCurvature)> = None;
    let mut finest_data: Option<WeierstrassData> = None;
    for level in 0..levels {
        if level > 0 {
            grid = grid.refined();
        }
        let b = BoundaryData::from_fns(
            &grid,
            |u| parsed.q.eval(u, grid.v0).unwrap_or(f64::NAN),
            |u| parsed.f.eval(u, grid.v0).unwrap_or(f64::NAN),
            |v| parsed.r.eval(grid.u0, v).unwrap_or(f64::NAN),
            |v| parsed.g.eval(grid.u0, v).unwrap_or(f64::NAN),
        );
        let d = stage("goursat_solve", goursat_solve(&b, &params, &grid, &solver))?;
        let evaluated = evaluate_level(&d)?;
        if let Some(p) = finest.take() {
            prev = Some(p.0);
        }
        finest = Some(evaluated);
        finest_data = Some(d);
    }

    let (mut level_norms, patch, fund, mc) = finest.unwrap();
    if let Some(prev) = prev {
        for (name, norms) in level_norms.suites.iter_mut() {
            if let Some(coarse) = prev.suites.get(name) {
                norms.order = convergence_order(coarse.sup, norms.sup);
            }
        }
    }

    let report = ResidualReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mu1: cfg.mu1,
        mu2: cfg.mu2,
        classification: classify(&params).label(),
        grid,
        refinement_levels: levels,
        harmonicity_family: family_name(level_norms.family).to_string(),
        suites: level_norms.suites,
        witness_sup: level_norms.witness_sup,
        witness_node: level_norms.witness_node,
    };

    Ok(PipelineOutput {
        report,
        patch,
        data: finest_data.unwrap(),
        fundamental: fund,
        mean_curvature: mc,
    })
}

/// Harmonicity assertion: the projected normal Gauss map must be harmonic
/// within `HARMONIC_ASSERT_TOL`. Fails for generic parameters with a
/// quantitative witness, or when a harmonic-family residual is large.
pub fn check_harmonicity_assertion(report: &ResidualReport) -> Result<()> {
    if report.witness_sup > HARMONIC_ASSERT_TOL {
        let node = report
            .witness_node
            .map(|(i, j)| format!(" at node ({i},{j})"))
            .unwrap_or_default();
        return Err(Error::Assertion(format!(
            "projected normal Gauss map is not harmonic for (mu1, mu2) = ({}, {}): \
             non-harmonicity witness {:.6e}{node} exceeds {HARMONIC_ASSERT_TOL:e}",
            report.mu1, report.mu2, report.witness_sup
        )));
    }
    if let Some(norms) = report.suites.get("harmonicity") {
        if norms.sup > HARMONIC_ASSERT_TOL {
            return Err(Error::Assertion(format!(
                "harmonicity residual sup {:.6e} exceeds {HARMONIC_ASSERT_TOL:e}",
                norms.sup
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Csv,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(MeshFormat::Obj),
            "csv" => Ok(MeshFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown mesh format `{other}` (expected obj or csv)"
            ))),
        }
    }
}

/// Render the mesh to a string. OBJ lists vertices as `v x1 x2 x0`
/// (spatial coordinates first, time last, so generic viewers show time
/// vertically) and quad faces over the grid. CSV has the header
/// `u,v,x0,x1,x2,e_omega,H` and one row per node with 17 significant
/// digits; both are byte-stable across runs.
pub fn render_mesh(
    patch: &ImmersionPatch,
    fund: &FundamentalForm,
    mc: &MeanCurvature,
    format: MeshFormat,
) -> String {
    let g = &patch.grid;
    let mut out = String::new();
    match format {
        MeshFormat::Obj => {
            out.push_str("# vertex order: x1 x2 x0 (time coordinate last)\n");
            for i in 0..g.nu {
                for j in 0..g.nv {
                    let p = patch.points.get(i, j);
                    out.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", p.x1, p.x2, p.x0));
                }
            }
            for i in 0..g.nu - 1 {
                for j in 0..g.nv - 1 {
                    let a = i * g.nv + j + 1;
                    let b = (i + 1) * g.nv + j + 1;
                    let c = (i + 1) * g.nv + j + 2;
                    let d = i * g.nv + j + 2;
                    out.push_str(&format!("f {a} {b} {c} {d}\n"));
                }
            }
        }
        MeshFormat::Csv => {
            out.push_str("u,v,x0,x1,x2,e_omega,H\n");
            for i in 0..g.nu {
                for j in 0..g.nv {
                    let p = patch.points.get(i, j);
                    out.push_str(&format!(
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        g.u(i),
                        g.v(j),
                        p.x0,
                        p.x1,
                        p.x2,
                        fund.e_omega.get(i, j),
                        mc.h.get(i, j)
                    ));
                }
            }
        }
    }
    out
}

pub fn export_mesh(
    patch: &ImmersionPatch,
    fund: &FundamentalForm,
    mc: &MeanCurvature,
    format: MeshFormat,
    path: &Path,
) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_mesh(patch, fund, mc, format).as_bytes())?;
    Ok(())
}

pub fn render_report(report: &ResidualReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

pub fn export_report(report: &ResidualReport, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_report(report).as_bytes())?;
    Ok(())
}
