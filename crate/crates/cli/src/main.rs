//! Command-line front end: generate surface meshes, verify residuals,
//! and sweep the parameter plane.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 config error,
//! 3 numerical abort. Log level is controlled by `RUST_LOG` only.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use minlor::pipeline::{
    check_harmonicity_assertion, export_mesh, export_report, run_pipeline, MeshFormat,
    PipelineOutput, RunConfig,
};
use minlor::Error;

#[derive(Parser)]
#[command(
    name = "minlor",
    version,
    about = "Minimal timelike surfaces in G(mu1, mu2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,

    /// Number of nested grid levels (overrides the config)
    #[arg(long)]
    refine: Option<usize>,

    /// Fail (exit 1) unless the projected normal Gauss map is harmonic
    #[arg(long)]
    assert_harmonic: bool,

    /// Mesh format (overrides the config)
    #[arg(long)]
    format: Option<String>,

    /// Output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary problem and export the surface mesh
    Generate(CommonArgs),
    /// Run all residual suites and export the report
    Verify(CommonArgs),
    /// Re-run the config across a lattice of (mu1, mu2) values
    Sweep(CommonArgs),
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Stage { source, .. } => exit_code_for(source),
        Error::Assertion(_) => 1,
        Error::Config(_)
        | Error::Expr(_)
        | Error::WrongVariable { .. }
        | Error::GridTooSmall { .. }
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if let Some(levels) = args.refine {
        cfg.solver.refinement_levels = levels;
    }
    if args.assert_harmonic {
        cfg.assert_harmonic = true;
    }
    if let Some(fmt) = &args.format {
        cfg.outputs.formats = vec![fmt.parse()?];
    }
    Ok(cfg)
}

fn out_dir(args: &CommonArgs) -> Result<PathBuf, Error> {
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn with_format_extension(path: &Path, format: MeshFormat) -> PathBuf {
    let ext = match format {
        MeshFormat::Obj => "obj",
        MeshFormat::Csv => "csv",
    };
    path.with_extension(ext)
}

fn write_outputs(
    cfg: &RunConfig,
    out: &PipelineOutput,
    dir: &Path,
    write_mesh: bool,
) -> Result<(), Error> {
    for &format in cfg.outputs.formats.iter().filter(|_| write_mesh) {
        let mesh_path = with_format_extension(&dir.join(&cfg.outputs.mesh_path), format);
        export_mesh(
            &out.patch,
            &out.fundamental,
            &out.mean_curvature,
            format,
            &mesh_path,
        )?;
        log::info!("wrote {}", mesh_path.display());
    }
    let report_path = dir.join(&cfg.outputs.report_path);
    export_report(&out.report, &report_path)?;
    log::info!("wrote {}", report_path.display());
    Ok(())
}

fn run_one(cfg: &RunConfig, dir: &Path, write_mesh: bool) -> Result<(), Error> {
    let out = run_pipeline(cfg)?;
    write_outputs(cfg, &out, dir, write_mesh)?;
    println!(
        "{}: sup|H| = {:.3e}, conformality = {:.3e}, harmonicity family = {}",
        out.report.classification,
        out.report.suites["mean_curvature"].sup,
        out.report.suites["conformality"].sup,
        out.report.harmonicity_family,
    );
    if cfg.assert_harmonic {
        check_harmonicity_assertion(&out.report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepEntry {
    mu1: f64,
    mu2: f64,
    classification: String,
    harmonicity_family: String,
    witness_sup: f64,
    mean_curvature_sup: f64,
}

/// 5x5 lattice over [-1, 1]^2 in steps of 0.5.
fn sweep(cfg: &RunConfig, dir: &Path) -> Result<(), Error> {
    let values: Vec<f64> = (-2..=2).map(|k| k as f64 / 2.0).collect();
    let mut entries = Vec::new();
    for &mu1 in &values {
        for &mu2 in &values {
            let mut point_cfg = cfg.clone();
            point_cfg.mu1 = mu1;
            point_cfg.mu2 = mu2;
            let out = run_pipeline(&point_cfg)?;
            entries.push(SweepEntry {
                mu1,
                mu2,
                classification: out.report.classification,
                harmonicity_family: out.report.harmonicity_family,
                witness_sup: out.report.witness_sup,
                mean_curvature_sup: out.report.suites["mean_curvature"].sup,
            });
        }
    }
    let path = dir.join("sweep.json");
    let mut text = serde_json::to_string_pretty(&entries).expect("sweep serializes");
    text.push('\n');
    std::fs::write(&path, text)?;
    println!(
        "swept {} parameter points -> {}",
        entries.len(),
        path.display()
    );
    Ok(())
}

fn real_main() -> Result<(), Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate(args) => {
            let cfg = load_config(args)?;
            run_one(&cfg, &out_dir(args)?, true)
        }
        Command::Verify(args) => {
            let cfg = load_config(args)?;
            run_one(&cfg, &out_dir(args)?, false)
        }
        Command::Sweep(args) => {
            let cfg = load_config(args)?;
            sweep(&cfg, &out_dir(args)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
