use rayon::prelude::*;
use serde::Serialize;

use super::chart::{Ambient, DerivativeMode, ImmersionChart};
use super::fields::{Product, ScalarField};
use super::frame::{frame_at, PointFrame};
use super::quadrature::quadrature_nodes;
use super::{GeometryError, Result};
use crate::curvature::{
    ell2k_pointwise, gauss_bonnet_h, gauss_equation, h_odd_from_lovelock, lovelock_tensor, spectrum, CurvatureTensor, LovelockTensor,
};
use crate::double_form::SymBilinearForm;

pub fn second_fundamental_forms(chart: &ImmersionChart, u: &[f64]) -> Result<Vec<SymBilinearForm>> {
    Ok(frame_at(chart, u)?.second_fundamental_forms())
}

pub fn riemann_at(chart: &ImmersionChart, u: &[f64], ambient: Ambient) -> Result<CurvatureTensor> {
    frame_at(chart, u)?.riemann(ambient)
}

pub fn hessian_at(chart: &ImmersionChart, u: &[f64], f: &dyn ScalarField) -> Result<SymBilinearForm> {
    let frame = frame_at(chart, u)?;
    Ok(frame.hessian(&chart.scalar_derivatives(f, u)?))
}

fn require_order(k: usize, n: usize, strict: bool) -> Result<()> {
    match (strict, 2 * k < n, 2 * k <= n) {
        (true, false, _) => Err(GeometryError::InvalidOrder { k, n, requirement: "2k < n" }),
        (false, _, false) => Err(GeometryError::InvalidOrder { k, n, requirement: "2k ≤ n" }),
        _ => Ok(()),
    }
}

fn intrinsic_lovelock(frame: &PointFrame, k: usize) -> Result<LovelockTensor> {
    Ok(lovelock_tensor(&frame.intrinsic_riemann()?, k)?)
}

/// `ℓ_2k f = −⟨T_2k, Hess f⟩` at `u`.
pub fn ell2k_at(chart: &ImmersionChart, u: &[f64], f: &dyn ScalarField, k: usize) -> Result<f64> {
    require_order(k, chart.dim(), true)?;
    let frame = frame_at(chart, u)?;
    let t = intrinsic_lovelock(&frame, k)?;
    let hess = frame.hessian(&chart.scalar_derivatives(f, u)?);
    Ok(ell2k_pointwise(&t, &hess)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Minimal,
    NotMinimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub tolerance: f64,
    pub keep_records: bool,
}

impl SweepOptions {
    /// `1e−8` with analytic derivatives, `1e−4` with finite differences.
    pub fn for_chart(chart: &ImmersionChart) -> Self {
        let tolerance = match chart.mode() {
            DerivativeMode::Analytic => 1e-8,
            DerivativeMode::FiniteDifference { .. } => 1e-4,
        };
        Self { tolerance, keep_records: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub u: Vec<f64>,
    /// `h_0, h_2, …` up to the intrinsic dimension.
    pub h: Vec<f64>,
    pub t_spectrum: Vec<f64>,
    /// `h_{2k+1}(N_α)` per normal.
    pub h_odd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub immersion: String,
    pub n: usize,
    pub codim: usize,
    pub k: usize,
    pub ambient: Ambient,
    pub derivative_mode: DerivativeMode,
    pub samples: usize,
    /// Largest `|h_{2k+1}(N_α)|` over samples and normals.
    pub max_residual: f64,
    /// Largest norm of the vector `(h_{2k+1}(N_α))_α`, independent of the normal frame.
    pub max_vector_norm: f64,
    pub h_2k_min: f64,
    pub h_2k_max: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<SampleRecord>,
}

struct SampleOutcome {
    h_odd: Vec<f64>,
    h_2k: f64,
    record: Option<SampleRecord>,
}

fn sample_invariants(chart: &ImmersionChart, u: &[f64], k: usize, ambient: Ambient, keep: bool) -> Result<SampleOutcome> {
    let frame = frame_at(chart, u)?;
    let forms: Vec<SymBilinearForm> =
        frame.normal_range(ambient)?.map(|a| frame.second_fundamental_form(&frame.normal[a])).collect();
    let r = gauss_equation(chart.dim(), &forms, &ambient.curvature())?;
    let t = lovelock_tensor(&r, k)?;
    let h_odd = forms.iter().map(|b| Ok(h_odd_from_lovelock(&t, b)?)).collect::<Result<Vec<f64>>>()?;
    let h_2k = gauss_bonnet_h(&r, k)?;
    let record = if keep {
        let h = (0..=chart.dim() / 2).map(|j| gauss_bonnet_h(&r, j)).collect::<std::result::Result<_, _>>()?;
        Some(SampleRecord { u: u.to_vec(), h, t_spectrum: spectrum(&t.form), h_odd: h_odd.clone() })
    } else {
        None
    };
    Ok(SampleOutcome { h_odd, h_2k, record })
}

/// Evaluates `h_{2k+1}(N_α)` for every normal of the ambient at every sample;
/// the immersion is reported (2k)-minimal when all of them vanish to `tolerance`.
pub fn minimality_residual(
    chart: &ImmersionChart,
    k: usize,
    samples: &[Vec<f64>],
    ambient: Ambient,
    options: &SweepOptions,
) -> Result<InvariantReport> {
    require_order(k, chart.dim(), false)?;
    if samples.is_empty() {
        return Err(GeometryError::EmptySamples);
    }
    let outcomes: Vec<SampleOutcome> = samples
        .par_iter()
        .map(|u| sample_invariants(chart, u, k, ambient, options.keep_records))
        .collect::<Result<_>>()?;
    let max_residual = outcomes.iter().flat_map(|o| o.h_odd.iter()).fold(0.0, |m: f64, v| m.max(v.abs()));
    let max_vector_norm = outcomes
        .iter()
        .map(|o| o.h_odd.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let h_2k_min = outcomes.iter().map(|o| o.h_2k).fold(f64::INFINITY, f64::min);
    let h_2k_max = outcomes.iter().map(|o| o.h_2k).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if max_residual < options.tolerance { Verdict::Minimal } else { Verdict::NotMinimal };
    Ok(InvariantReport {
        immersion: chart.name().to_string(),
        n: chart.dim(),
        codim: chart.codim(),
        k,
        ambient,
        derivative_mode: chart.mode().clone(),
        samples: samples.len(),
        max_residual,
        max_vector_norm,
        h_2k_min,
        h_2k_max,
        tolerance: options.tolerance,
        verdict,
        records: outcomes.into_iter().filter_map(|o| o.record).collect(),
    })
}

/// `ℓ_2k` applied to every ambient coordinate function, next to `Σ_α h_{2k+1}(N_α) N_α`.
fn coordinate_ell(frame: &PointFrame, t: &LovelockTensor) -> Result<(Vec<f64>, Vec<f64>)> {
    let ell = frame
        .coordinate_hessians()
        .iter()
        .map(|h| Ok(ell2k_pointwise(t, h)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut predicted = vec![0.0; frame.position.len()];
    for nv in &frame.normal {
        let h = h_odd_from_lovelock(t, &frame.second_fundamental_form(nv))?;
        predicted.iter_mut().zip(nv).for_each(|(p, v)| *p += h * v);
    }
    Ok((ell, predicted))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub immersion: String,
    pub k: usize,
    pub samples: usize,
    /// Largest `|ℓ_2k F_i|`.
    pub max_ell: f64,
    /// Largest componentwise `|ℓ_2k F − Σ_α h_{2k+1}(N_α) N_α|`.
    pub max_mismatch: f64,
    /// Largest `|h_{2k+1}(N_α)|`.
    pub max_minimality_residual: f64,
    pub tolerance: f64,
    pub harmonic: bool,
    pub minimal: bool,
    /// The identity holds and harmonicity coincides with minimality.
    pub consistent: bool,
}

/// Checks `ℓ_2k F = Σ_α h_{2k+1}(N_α) N_α` componentwise for an immersion in
/// Euclidean space.
pub fn coordinate_harmonicity(
    chart: &ImmersionChart,
    k: usize,
    samples: &[Vec<f64>],
    options: &SweepOptions,
) -> Result<HarmonicityReport> {
    if chart.ambient() != Ambient::Euclidean {
        return Err(GeometryError::InvalidAmbient("coordinate harmonicity needs a Euclidean ambient".into()));
    }
    require_order(k, chart.dim(), false)?;
    if samples.is_empty() {
        return Err(GeometryError::EmptySamples);
    }
    let per_sample: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|u| {
            let frame = frame_at(chart, u)?;
            let t = intrinsic_lovelock(&frame, k)?;
            let (ell, predicted) = coordinate_ell(&frame, &t)?;
            let max_ell = ell.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            let mismatch = ell.iter().zip(&predicted).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
            let residual = frame
                .normal
                .iter()
                .map(|nv| Ok(h_odd_from_lovelock(&t, &frame.second_fundamental_form(nv))?.abs()))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((max_ell, mismatch, residual))
        })
        .collect::<Result<_>>()?;
    let max_ell = per_sample.iter().map(|s| s.0).fold(0.0, f64::max);
    let max_mismatch = per_sample.iter().map(|s| s.1).fold(0.0, f64::max);
    let max_minimality_residual = per_sample.iter().map(|s| s.2).fold(0.0, f64::max);
    let tol = options.tolerance;
    let harmonic = max_ell < tol;
    let minimal = max_minimality_residual < tol;
    Ok(HarmonicityReport {
        immersion: chart.name().to_string(),
        k,
        samples: samples.len(),
        max_ell,
        max_mismatch,
        max_minimality_residual,
        tolerance: tol,
        harmonic,
        minimal,
        consistent: harmonic == minimal && max_mismatch < tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereCheckReport {
    pub immersion: String,
    pub k: usize,
    pub samples: usize,
    /// Largest componentwise `|ℓ_2k F − φF|` with `φ = ⟨ℓ_2k F, F⟩`.
    pub max_residual: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<f64>,
}

/// For an immersion into the unit sphere, tests `ℓ_2k F = φF`, which holds
/// exactly when the immersion is (2k)-minimal in the sphere.
pub fn sphere_eigen_check(
    chart: &ImmersionChart,
    k: usize,
    samples: &[Vec<f64>],
    options: &SweepOptions,
) -> Result<SphereCheckReport> {
    require_order(k, chart.dim(), false)?;
    if samples.is_empty() {
        return Err(GeometryError::EmptySamples);
    }
    let per_sample: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|u| {
            let frame = frame_at(chart, u)?;
            let x = &frame.position;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(GeometryError::NotOnSphere { u: u.clone(), norm });
            }
            let t = intrinsic_lovelock(&frame, k)?;
            let (ell, _) = coordinate_ell(&frame, &t)?;
            let phi: f64 = ell.iter().zip(x).map(|(a, b)| a * b).sum();
            let residual = ell.iter().zip(x).fold(0.0, |m: f64, (a, b)| m.max((a - phi * b).abs()));
            Ok((residual, phi))
        })
        .collect::<Result<_>>()?;
    let max_residual = per_sample.iter().map(|s| s.0).fold(0.0, f64::max);
    Ok(SphereCheckReport {
        immersion: chart.name().to_string(),
        k,
        samples: samples.len(),
        max_residual,
        phi_min: per_sample.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        phi_max: per_sample.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
        tolerance: options.tolerance,
        verdict: if max_residual < options.tolerance { Verdict::Minimal } else { Verdict::NotMinimal },
        phi: if options.keep_records { per_sample.iter().map(|s| s.1).collect() } else { Vec::new() },
    })
}

/// `ℓ(fg) − fℓg − gℓf + 2T_2k(∇f, ∇g)` at `u`; vanishes identically.
pub fn pointwise_product_rule(
    chart: &ImmersionChart,
    u: &[f64],
    f: std::sync::Arc<dyn ScalarField>,
    g: std::sync::Arc<dyn ScalarField>,
    k: usize,
) -> Result<f64> {
    require_order(k, chart.dim(), true)?;
    let frame = frame_at(chart, u)?;
    let t = intrinsic_lovelock(&frame, k)?;
    let df = chart.scalar_derivatives(f.as_ref(), u)?;
    let dg = chart.scalar_derivatives(g.as_ref(), u)?;
    let dfg = chart.scalar_derivatives(&Product(f, g), u)?;
    let ell = |d| ell2k_pointwise(&t, &frame.hessian(d));
    let cross = t.form.eval(&frame.gradient(&df), &frame.gradient(&dg));
    Ok(ell(&dfg)? - df.value * ell(&dg)? - dg.value * ell(&df)? + 2.0 * cross)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralReport {
    pub k: usize,
    pub quadrature_nodes: usize,
    pub volume: f64,
    /// `∫ ℓ_2k f dμ`, zero because `ℓ_2k f` is a divergence.
    pub integral_ell: f64,
    /// `∫ (f ℓ_2k f − T_2k(∇f, ∇f)) dμ`, zero by self-adjointness.
    pub integral_quadratic: f64,
    /// `∫ T_2k(∇f, ∇f) dμ`, the scale of the quadratic identity.
    pub energy: f64,
}

/// Quadrature of the divergence and self-adjointness identities of `ℓ_2k` over a closed chart.
pub fn integral_identities(chart: &ImmersionChart, f: &dyn ScalarField, k: usize, m: usize) -> Result<IntegralReport> {
    require_order(k, chart.dim(), true)?;
    let nodes = quadrature_nodes(chart, m)?;
    let parts: Vec<[f64; 4]> = nodes
        .par_iter()
        .map(|q| {
            let frame = frame_at(chart, &q.u)?;
            let t = intrinsic_lovelock(&frame, k)?;
            let d = chart.scalar_derivatives(f, &q.u)?;
            let ell = ell2k_pointwise(&t, &frame.hessian(&d))?;
            let grad = frame.gradient(&d);
            let energy = t.form.eval(&grad, &grad);
            let w = frame.volume_density() * q.weight;
            Ok([w, ell * w, (d.value * ell - energy) * w, energy * w])
        })
        .collect::<Result<_>>()?;
    let sum = |i: usize| parts.iter().map(|p| p[i]).sum::<f64>();
    Ok(IntegralReport {
        k,
        quadrature_nodes: nodes.len(),
        volume: sum(0),
        integral_ell: sum(1),
        integral_quadratic: sum(2),
        energy: sum(3),
    })
}
