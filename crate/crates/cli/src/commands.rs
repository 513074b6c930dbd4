use std::time::Instant;

use gbcurv_core::curvature::{gauss_bonnet_h, lovelock_tensor, spectrum};
use gbcurv_core::geometry::{
    coordinate_harmonicity, first_variation, frame_at, minimality_residual, resolve_immersion, sample_grid,
    sphere_eigen_check, AmbientLinear, GeometryError, ImmersionChart, SweepOptions, VariationField,
};
use gbcurv_core::identities::{run_suite, SuiteConfig, SuiteReport};
use gbcurv_core::symm::{elementary_symmetric_star, newton_transform, newton_transform_contraction, shift_expansion};
use gbcurv_core::{AlgebraError, SymBilinearForm, SymmetricFunctionTable};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::{FieldKind, ImmersionArgs, Output};

/// Largest dimension accepted by the algebra commands.
const MAX_ALGEBRA_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Degenerate { .. } | GeometryError::NotOnSphere { .. } | GeometryError::Algebra(_) => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// A finished command: the JSON document and whether its check passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

fn envelope<T: Serialize>(command: &str, config: Value, report: &T, passed: bool, started: Instant, out: &Output) -> Result<Outcome, CliError> {
    let mut doc = json!({
        "command": command,
        "config": config,
        "passed": passed,
        "report": serde_json::to_value(report)?,
    });
    if !out.deterministic {
        doc["elapsed_seconds"] = json!(started.elapsed().as_secs_f64());
    }
    Ok(Outcome { report: doc, passed })
}

pub fn identities(n_min: usize, n_max: usize, trials: usize, seed: u64, tol: Option<f64>, exact: bool, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    if n_min < 2 || n_max < n_min || n_max > MAX_ALGEBRA_DIM {
        return Err(CliError::Usage(format!("need 2 ≤ n-min ≤ n-max ≤ {MAX_ALGEBRA_DIM}, got {n_min}..{n_max}")));
    }
    if trials == 0 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    let tolerance = check_tolerance(tol, 1e-9)?;
    let config = SuiteConfig { n_min, n_max, trials, seed, tolerance: if exact { 0.0 } else { tolerance } };
    let report: SuiteReport =
        if exact { run_suite::<BigRational>(&config)? } else { run_suite::<f64>(&config)? };
    let passed = report.all_passed;
    envelope("identities", serde_json::to_value(&config)?, &report, passed, started, out)
}

fn check_tolerance(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Usage(format!("tolerance must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("bad matrix entry '{v}': {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(CliError::Usage("matrix must be square, rows separated by ';'".into()));
    }
    Ok(rows)
}

pub struct SymmInput {
    pub matrix: Option<String>,
    pub diag: Option<String>,
    pub n: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    pub tol: Option<f64>,
}

pub fn symm(input: SymmInput, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let tolerance = check_tolerance(input.tol, 1e-9)?;
    let rows = match (&input.matrix, &input.diag) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --matrix or --diag".into())),
        (Some(m), None) => parse_matrix(m)?,
        (None, Some(d)) => {
            let values = d
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("bad diagonal entry '{v}': {e}"))))
                .collect::<Result<Vec<f64>, _>>()?;
            (0..values.len()).map(|i| (0..values.len()).map(|j| if i == j { values[i] } else { 0.0 }).collect()).collect()
        }
        (None, None) => {
            if input.n == 0 {
                return Err(CliError::Usage("dimension must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
            let mut m = vec![vec![0.0; input.n]; input.n];
            for i in 0..input.n {
                for j in i..input.n {
                    let v: f64 = rng.random_range(-1.0..=1.0);
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        }
    };
    let n = rows.len();
    if n > MAX_ALGEBRA_DIM {
        return Err(CliError::Usage(format!("dimension {n} exceeds {MAX_ALGEBRA_DIM}")));
    }
    let b = SymBilinearForm::from_matrix(rows.clone())?;
    let table = SymmetricFunctionTable::of(&b)?;
    let mut max_deviation: f64 = 0.0;
    let mut newton = Vec::new();
    for k in 0..=n {
        let s_star = elementary_symmetric_star(&b, k)?;
        max_deviation = max_deviation.max((s_star - table.get(k)).abs() / (1.0 + table.get(k).abs()));
        let t = newton_transform(&b, k)?;
        let t_c = newton_transform_contraction(&b, k)?;
        max_deviation = max_deviation.max(t.form().max_abs_diff(t_c.form())?);
        let pairing = t.form().inner_product(b.form())?;
        let expected = if k < n { (k + 1) as f64 * table.get(k + 1) } else { 0.0 };
        max_deviation = max_deviation.max((pairing - expected).abs() / (1.0 + expected.abs()));
        newton.push(json!({ "k": k, "t_k": t.matrix(), "pairing_with_b": pairing, "trace": t.trace() }));
    }
    let shifts = input
        .lambdas
        .iter()
        .map(|&lambda| {
            let values = (0..=n).map(|k| shift_expansion(&b, &lambda, k)).collect::<Result<Vec<f64>, _>>()?;
            Ok(json!({ "lambda": lambda, "s_k_of_b_plus_lambda_g": values }))
        })
        .collect::<Result<Vec<Value>, CliError>>()?;
    let passed = max_deviation <= tolerance;
    let report = json!({
        "b": rows,
        "s_k": table.values(),
        "eigenvalues": spectrum(&b),
        "newton": newton,
        "shift": shifts,
        "max_route_deviation": max_deviation,
        "tolerance": tolerance,
    });
    let config = json!({ "n": n, "seed": input.seed, "lambdas": input.lambdas });
    envelope("symm", config, &report, passed, started, out)
}

/// Parses `name|path key=value…`; comma-joined pairs such as `r1=1,r2=2` are accepted too.
fn chart_of(args: &ImmersionArgs) -> Result<ImmersionChart, CliError> {
    let (spec, rest) = args.immersion.split_first().ok_or_else(|| CliError::Usage("--immersion needs a name".into()))?;
    let mut params = Vec::new();
    for token in rest.iter().flat_map(|t| t.split(',')).filter(|t| !t.is_empty()) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{token}'")))?;
        params.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(resolve_immersion(spec, &params)?)
}

fn immersion_config(args: &ImmersionArgs, chart: &ImmersionChart, k: usize, grid: usize, samples: usize) -> Value {
    json!({
        "immersion": args.immersion,
        "chart": chart.name(),
        "n": chart.dim(),
        "ambient_dim": chart.ambient_dim(),
        "k": k,
        "grid": grid,
        "samples": samples,
    })
}

fn samples_of(chart: &ImmersionChart, grid: usize) -> Result<Vec<Vec<f64>>, CliError> {
    if grid == 0 && chart.node_grid().is_none() {
        return Err(CliError::Usage("grid must be positive".into()));
    }
    Ok(sample_grid(chart, grid))
}

fn sweep_options(chart: &ImmersionChart, tol: Option<f64>, keep_records: bool) -> Result<SweepOptions, CliError> {
    let defaults = SweepOptions::for_chart(chart);
    Ok(SweepOptions { tolerance: check_tolerance(tol, defaults.tolerance)?, keep_records })
}

pub fn minimality(args: &ImmersionArgs, k: usize, grid: usize, tol: Option<f64>, dump: bool, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let chart = chart_of(args)?;
    let samples = samples_of(&chart, grid)?;
    let opts = sweep_options(&chart, tol, dump)?;
    let report = minimality_residual(&chart, k, &samples, chart.ambient(), &opts)?;
    let config = immersion_config(args, &chart, k, grid, samples.len());
    envelope("minimality", config, &report, true, started, out)
}

pub fn invariants(args: &ImmersionArgs, k: usize, grid: usize, tol: Option<f64>, dump: bool, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let chart = chart_of(args)?;
    let samples = samples_of(&chart, grid)?;
    let opts = sweep_options(&chart, tol, true)?;
    let report = minimality_residual(&chart, k, &samples, chart.ambient(), &opts)?;
    let mut doc = serde_json::to_value(&report)?;
    if dump {
        let ambient = chart.ambient();
        let tensors = samples
            .iter()
            .map(|u| {
                let frame = frame_at(&chart, u)?;
                let r = frame.riemann(ambient)?;
                let t = lovelock_tensor(&r, k).map_err(GeometryError::from)?;
                let b: Vec<Vec<Vec<f64>>> = frame.second_fundamental_forms().iter().map(|f| f.matrix()).collect();
                Ok(json!({
                    "u": u,
                    "metric": frame.metric,
                    "second_fundamental_forms": b,
                    "lovelock_tensor": t.form.matrix(),
                    "h_2k": gauss_bonnet_h(&r, k).map_err(GeometryError::from)?,
                }))
            })
            .collect::<Result<Vec<Value>, CliError>>()?;
        doc["tensors"] = Value::Array(tensors);
    }
    let config = immersion_config(args, &chart, k, grid, samples.len());
    envelope("invariants", config, &doc, true, started, out)
}

pub fn harmonicity(args: &ImmersionArgs, k: usize, grid: usize, tol: Option<f64>, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let chart = chart_of(args)?;
    let samples = samples_of(&chart, grid)?;
    let opts = sweep_options(&chart, tol, false)?;
    let report = coordinate_harmonicity(&chart, k, &samples, &opts)?;
    let config = immersion_config(args, &chart, k, grid, samples.len());
    envelope("harmonicity", config, &report, report.consistent, started, out)
}

pub fn sphere_check(args: &ImmersionArgs, k: usize, grid: usize, tol: Option<f64>, dump: bool, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let chart = chart_of(args)?;
    let samples = samples_of(&chart, grid)?;
    let opts = sweep_options(&chart, tol, dump)?;
    let report = sphere_eigen_check(&chart, k, &samples, &opts)?;
    let config = immersion_config(args, &chart, k, grid, samples.len());
    envelope("sphere-check", config, &report, true, started, out)
}

pub struct VariationInput {
    pub field: FieldKind,
    pub normal_index: usize,
    pub dt: f64,
    pub seed: u64,
}

fn random_amplitude(rng: &mut ChaCha8Rng, dim: usize) -> AmbientLinear {
    AmbientLinear { c0: rng.random_range(-1.0..=1.0), w: (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect() }
}

pub fn variation(args: &ImmersionArgs, k: usize, grid: usize, input: VariationInput, out: &Output) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let chart = chart_of(args)?;
    if grid == 0 {
        return Err(CliError::Usage("grid must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    let amplitude = random_amplitude(&mut rng, chart.ambient_dim());
    let field = match input.field {
        FieldKind::Radial => VariationField::Radial,
        FieldKind::Tangent => {
            let plane = chart
                .rotation_plane()
                .ok_or_else(|| CliError::Usage(format!("{} has no rotation symmetry for a tangent field", chart.name())))?;
            VariationField::Rotational { plane, amplitude }
        }
        FieldKind::Normal => VariationField::Normal { index: input.normal_index, amplitude },
    };
    let report = first_variation(&chart, &field, k, grid, input.dt)?;
    let mut config = immersion_config(args, &chart, k, grid, report.quadrature_nodes);
    config["field"] = serde_json::to_value(&field)?;
    config["dt"] = json!(input.dt);
    config["seed"] = json!(input.seed);
    envelope("variation", config, &report, report.agrees, started, out)
}
