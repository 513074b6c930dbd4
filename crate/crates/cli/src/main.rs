//! `gbcurv`: algebra identity certification, Gauss-Bonnet invariants of
//! immersions, minimality verdicts and first-variation experiments, reported
//! as JSON.
//!
//! Exit codes: 0 pass, 1 assertion or verdict failure, 2 usage error.

mod commands;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome, SymmInput, VariationInput};

#[derive(Parser)]
#[command(name = "gbcurv", version, about = "Double-form calculus and generalized minimal submanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Clone)]
pub struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit wall-clock timings so identical runs give byte-identical reports.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Args, Clone)]
pub struct ImmersionArgs {
    /// Catalog name or immersion file path, followed by key=value parameters.
    #[arg(long, required = true, num_args = 1.., value_name = "NAME|PATH [KEY=VALUE]...")]
    immersion: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FieldKind {
    /// ξ = x
    Radial,
    /// Rotation generator of the chart's symmetry plane with a random linear amplitude.
    Tangent,
    /// A natural normal of the chart with a random linear amplitude.
    Normal,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the double-form, symmetric-function and curvature identity suites.
    Identities {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Relative tolerance in floating mode.
        #[arg(long)]
        tol: Option<f64>,
        /// Exact rational arithmetic; every deviation must vanish.
        #[arg(long)]
        exact: bool,
    },
    /// Symmetric functions, Newton transformations and shifts of one bilinear form.
    Symm {
        /// Rows separated by ';', entries by ','.
        #[arg(long)]
        matrix: Option<String>,
        /// Diagonal entries separated by ','.
        #[arg(long)]
        diag: Option<String>,
        /// Dimension of the random form used when no matrix is given.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long = "lambda", allow_negative_numbers = true, value_delimiter = ',', default_values_t = [-2.0, -1.0, 0.5, 3.0])]
        lambdas: Vec<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Per-sample Gauss-Bonnet curvatures, Lovelock spectra and odd invariants.
    Invariants {
        #[command(flatten)]
        immersion: ImmersionArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Also emit the metric, second fundamental forms and Lovelock tensor per sample.
        #[arg(long)]
        dump_tensors: bool,
    },
    /// (2k)-minimality verdict from the largest |h_{2k+1}(N)| over a sample grid.
    Minimality {
        #[command(flatten)]
        immersion: ImmersionArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Include per-sample records.
        #[arg(long)]
        dump_tensors: bool,
    },
    /// Compares ℓ_2k of the coordinate functions with Σ h_{2k+1}(N_α) N_α.
    Harmonicity {
        #[command(flatten)]
        immersion: ImmersionArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// First variation of the total Gauss-Bonnet curvature along a vector field.
    Variation {
        #[command(flatten)]
        immersion: ImmersionArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Quadrature points per axis.
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = FieldKind::Radial)]
        field: FieldKind,
        #[arg(long, default_value_t = 0)]
        normal_index: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Tests ℓ_2k F = φF for an immersion into the unit sphere.
    SphereCheck {
        #[command(flatten)]
        immersion: ImmersionArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Include φ per sample.
        #[arg(long)]
        dump_tensors: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("GBCURV_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("GBCURV_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let out = &cli.output;
    match cli.command {
        Command::Identities { n_min, n_max, trials, seed, tol, exact } => {
            commands::identities(n_min, n_max, trials, seed, tol, exact, out)
        }
        Command::Symm { matrix, diag, n, seed, lambdas, tol } => {
            commands::symm(SymmInput { matrix, diag, n, seed, lambdas, tol }, out)
        }
        Command::Invariants { immersion, k, grid, tol, dump_tensors } => {
            commands::invariants(&immersion, k, grid, tol, dump_tensors, out)
        }
        Command::Minimality { immersion, k, grid, tol, dump_tensors } => {
            commands::minimality(&immersion, k, grid, tol, dump_tensors, out)
        }
        Command::Harmonicity { immersion, k, grid, tol } => commands::harmonicity(&immersion, k, grid, tol, out),
        Command::Variation { immersion, k, grid, field, normal_index, dt, seed } => {
            commands::variation(&immersion, k, grid, VariationInput { field, normal_index, dt, seed }, out)
        }
        Command::SphereCheck { immersion, k, grid, tol, dump_tensors } => {
            commands::sphere_check(&immersion, k, grid, tol, dump_tensors, out)
        }
    }
}

fn emit(outcome: &Outcome, out: &Output) -> Result<(), CliError> {
    let text = json::to_string(&outcome.report)?;
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|outcome| emit(&outcome, &output).map(|_| outcome.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gbcurv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
