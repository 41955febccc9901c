//! Python bindings: run the surface pipeline from a TOML config string
//! and inspect the resulting patch, diagnostics, and report.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use minlor::expr::parse_expression;
use minlor::gauss_map::{normal_at, stereographic_project};
use minlor::lie_group::{classify, sectional_curvature, ModelParams};
use minlor::pipeline::{
    check_harmonicity_assertion, render_mesh, render_report, run_pipeline, MeshFormat,
    PipelineOutput, RunConfig,
};
use minlor::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Expr(_) | Error::WrongVariable { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Space-form label of G(mu1, mu2), e.g. "Minkowski", "deSitter(1)",
/// "E(1,1)".
#[pyfunction]
fn classify_space(mu1: f64, mu2: f64) -> String {
    classify(&ModelParams::new(mu1, mu2)).label()
}

/// Sectional curvatures (K01, K12, K02) of the coordinate planes.
#[pyfunction]
fn sectional_curvatures(mu1: f64, mu2: f64) -> (f64, f64, f64) {
    let p = ModelParams::new(mu1, mu2);
    (
        sectional_curvature((0, 1), &p),
        sectional_curvature((1, 2), &p),
        sectional_curvature((0, 2), &p),
    )
}

/// Evaluate a boundary-data expression at (u, v).
#[pyfunction]
fn eval_expression(src: &str, u: f64, v: f64) -> PyResult<f64> {
    let e = parse_expression(src).map_err(|e| PyValueError::new_err(e.to_string()))?;
    e.eval(u, v)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Left-translated unit normal and its stereographic image for a
/// pointwise (q, r).
#[pyfunction]
#[allow(clippy::type_complexity)]
fn gauss_map_point(q: f64, r: f64) -> PyResult<((f64, f64, f64), (f64, f64))> {
    let n = normal_at(q, r).map_err(py_err)?;
    let p = stereographic_project(&n).map_err(py_err)?;
    Ok(((n.0.y0, n.0.y1, n.0.y2), (p.a, p.b)))
}

/// A solved and integrated surface patch with its residual report.
#[pyclass]
struct Surface {
    out: PipelineOutput,
}

#[pymethods]
impl Surface {
    /// Grid shape (nu, nv).
    fn shape(&self) -> (usize, usize) {
        (self.out.patch.grid.nu, self.out.patch.grid.nv)
    }

    /// Coordinates (x0, x1, x2) of node (i, j).
    fn point(&self, i: usize, j: usize) -> PyResult<(f64, f64, f64)> {
        let g = &self.out.patch.grid;
        if i >= g.nu || j >= g.nv {
            return Err(PyValueError::new_err(format!(
                "node ({i},{j}) outside {}x{} grid",
                g.nu, g.nv
            )));
        }
        let p = self.out.patch.points.get(i, j);
        Ok((p.x0, p.x1, p.x2))
    }

    /// Conformal factor e^omega at node (i, j).
    fn e_omega(&self, i: usize, j: usize) -> f64 {
        *self.out.fundamental.e_omega.get(i, j)
    }

    /// Mean curvature at node (i, j).
    fn mean_curvature(&self, i: usize, j: usize) -> f64 {
        *self.out.mean_curvature.h.get(i, j)
    }

    /// The residual report as a JSON string.
    fn report_json(&self) -> String {
        render_report(&self.out.report)
    }

    /// Render the mesh: format is "obj" or "csv".
    fn mesh(&self, format: &str) -> PyResult<String> {
        let fmt: MeshFormat = format.parse().map_err(py_err)?;
        Ok(render_mesh(
            &self.out.patch,
            &self.out.fundamental,
            &self.out.mean_curvature,
            fmt,
        ))
    }

    /// Raise if the projected normal Gauss map is not harmonic.
    fn assert_harmonic(&self) -> PyResult<()> {
        check_harmonicity_assertion(&self.out.report).map_err(py_err)
    }
}

/// Run the full pipeline for a TOML config string.
#[pyfunction]
fn run(config_toml: &str) -> PyResult<Surface> {
    let cfg = RunConfig::from_toml_str(config_toml).map_err(py_err)?;
    let out = run_pipeline(&cfg).map_err(py_err)?;
    Ok(Surface { out })
}

#[pymodule]
fn minlor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_function(wrap_pyfunction!(classify_space, m)?)?;
    m.add_function(wrap_pyfunction!(sectional_curvatures, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expression, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_map_point, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
