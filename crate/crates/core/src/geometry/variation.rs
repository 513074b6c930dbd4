use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::chart::{Ambient, ImmersionChart, ParamMap};
use super::fields::AmbientLinear;
use super::frame::frame_at;
use super::jet::{Jet2, Real};
use super::quadrature::{quadrature_nodes, QuadratureNode};
use super::{GeometryError, Result};
use crate::curvature::{gauss_bonnet_h, lovelock_tensor};
use crate::double_form::SymBilinearForm;

/// A variation vector field `ξ`, evaluated from the position `x = F(u)` and,
/// for normal fields, the chart's natural normals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariationField {
    /// `ξ = x`
    Radial,
    /// `ξ = A x + b`
    Linear { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// `ξ = a(x)·J x` with `J` the rotation generator of the coordinate plane
    /// `(i, j)`; tangent whenever the chart is invariant under that rotation.
    Rotational { plane: (usize, usize), amplitude: AmbientLinear },
    /// `ξ = a(x)·N_index(u)` along a natural normal of the chart.
    Normal { index: usize, amplitude: AmbientLinear },
}

fn linear<R: Real>(a: &AmbientLinear, x: &[R]) -> R {
    x.iter().zip(&a.w).fold(x[0].cst(a.c0), |acc, (&xi, &wi)| acc + xi * wi)
}

impl VariationField {
    fn eval<R: Real>(&self, x: &[R], normals: Option<&[Vec<R>]>) -> Vec<R> {
        match self {
            VariationField::Radial => x.to_vec(),
            VariationField::Linear { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, &b)| row.iter().zip(x).fold(x[0].cst(b), |acc, (&m, &xi)| acc + xi * m))
                .collect(),
            VariationField::Rotational { plane: (i, j), amplitude } => {
                let a = linear(amplitude, x);
                let mut out = vec![x[0].cst(0.0); x.len()];
                out[*i] = -(x[*j] * a);
                out[*j] = x[*i] * a;
                out
            }
            VariationField::Normal { index, amplitude } => {
                let a = linear(amplitude, x);
                let normals = normals.expect("validated before use");
                normals[*index].iter().map(|&v| v * a).collect()
            }
        }
    }

    fn validate(&self, chart: &ImmersionChart) -> Result<()> {
        let big_n = chart.ambient_dim();
        let amplitude_ok = |a: &AmbientLinear| a.w.len() == big_n;
        let ok = match self {
            VariationField::Radial => true,
            VariationField::Linear { matrix, offset } => {
                matrix.len() == big_n && offset.len() == big_n && matrix.iter().all(|r| r.len() == big_n)
            }
            VariationField::Rotational { plane: (i, j), amplitude } => {
                i != j && *i < big_n && *j < big_n && amplitude_ok(amplitude)
            }
            VariationField::Normal { index, amplitude } => {
                let mid = chart.domain().midpoint();
                let count = chart.natural_normals(&mid).map(|v| v.len()).unwrap_or(0);
                if count == 0 {
                    return Err(GeometryError::InvalidVariation(format!("{} has no natural normals", chart.name())));
                }
                *index < count && amplitude_ok(amplitude)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidVariation(format!("field does not fit an ambient of dimension {big_n}")))
        }
    }

    /// `ξ` at a parameter point.
    pub fn at(&self, chart: &ImmersionChart, u: &[f64]) -> Result<Vec<f64>> {
        let x = chart.eval(u)?;
        let normals = chart.natural_normals(u);
        Ok(self.eval(&x, normals.as_deref()))
    }
}

/// The deformed immersion `F + tξ`.
pub struct PerturbedMap {
    base: Arc<dyn ParamMap>,
    field: VariationField,
    t: f64,
}

impl PerturbedMap {
    pub fn new(base: Arc<dyn ParamMap>, field: VariationField, t: f64) -> Self {
        Self { base, field, t }
    }
}

impl ParamMap for PerturbedMap {
    fn param_dim(&self) -> usize {
        self.base.param_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let x = self.base.eval(u);
        let normals = self.base.normals(u);
        let xi = self.field.eval(&x, normals.as_deref());
        x.iter().zip(&xi).map(|(a, b)| a + self.t * b).collect()
    }
    fn eval_jet(&self, u: &[Jet2]) -> Option<Vec<Jet2>> {
        let x = self.base.eval_jet(u)?;
        let normals = match self.field {
            VariationField::Normal { .. } => Some(self.base.normals_jet(u)?),
            _ => None,
        };
        let xi = self.field.eval(&x, normals.as_deref());
        Some(x.iter().zip(&xi).map(|(&a, &b)| a + b * self.t).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstVariation {
    pub k: usize,
    pub dt: f64,
    pub quadrature_nodes: usize,
    /// `∫ h_2k dμ` of the undeformed immersion.
    pub total: f64,
    /// `[H(dt) − H(−dt)] / 2dt`
    pub numeric: f64,
    /// Richardson extrapolation of the centered differences at `dt` and `dt/2`.
    pub numeric_richardson: f64,
    /// `∫ h_{2k+1}(ξ^⊥) dμ`
    pub predicted: f64,
    /// `numeric / predicted`, absent when the prediction vanishes.
    pub ratio: Option<f64>,
    /// `|numeric − predicted| ≤ max(1e−3, 0.01·|predicted|)`
    pub agrees: bool,
}

fn deformed(chart: &ImmersionChart, field: &VariationField, t: f64) -> Result<ImmersionChart> {
    let map = PerturbedMap::new(chart.map().clone(), field.clone(), t);
    let c = ImmersionChart::new(format!("{}+tξ", chart.name()), Arc::new(map), chart.domain().clone(), Ambient::Euclidean)?;
    Ok(c.with_mode(chart.mode().clone())?.with_closed(chart.is_closed()))
}

fn total_h(chart: &ImmersionChart, nodes: &[QuadratureNode], k: usize) -> Result<f64> {
    let parts: Vec<f64> = nodes
        .par_iter()
        .map(|q| {
            let frame = frame_at(chart, &q.u)?;
            let h = gauss_bonnet_h(&frame.intrinsic_riemann()?, k)?;
            Ok(h * frame.volume_density() * q.weight)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Compares the centered derivative of `t ↦ ∫ h_2k(F + tξ) dμ_t` at `t = 0` with
/// `∫ h_{2k+1}(ξ^⊥) dμ` on the quadrature of a closed chart with `m` points per axis.
pub fn first_variation(
    chart: &ImmersionChart,
    field: &VariationField,
    k: usize,
    m: usize,
    dt: f64,
) -> Result<FirstVariation> {
    let n = chart.dim();
    if 2 * k >= n {
        return Err(GeometryError::InvalidOrder { k, n, requirement: "2k < n" });
    }
    if !chart.is_closed() {
        return Err(GeometryError::InvalidVariation(format!(
            "{} is not closed and the field has no compact support",
            chart.name()
        )));
    }
    if !(dt > 0.0) {
        return Err(GeometryError::InvalidParameter("dt must be positive".into()));
    }
    field.validate(chart)?;
    let nodes = quadrature_nodes(chart, m)?;

    let base: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|q| {
            let frame = frame_at(chart, &q.u)?;
            let r = frame.intrinsic_riemann()?;
            let t = lovelock_tensor(&r, k)?;
            let xi = field.at(chart, &q.u)?;
            // B along ξ^⊥ = Σ ⟨ξ, N_α⟩ N_α, by linearity of N ↦ B_N
            let mut b_xi = SymBilinearForm::zero(n);
            for nv in &frame.normal {
                let c: f64 = xi.iter().zip(nv).map(|(a, b)| a * b).sum();
                b_xi = b_xi.try_add(&frame.second_fundamental_form(nv).scale(&c))?;
            }
            let w = frame.volume_density() * q.weight;
            let h_odd = t.form.form().inner_product(b_xi.form())?;
            Ok((gauss_bonnet_h(&r, k)? * w, h_odd * w))
        })
        .collect::<Result<_>>()?;
    let total = base.iter().map(|p| p.0).sum();
    let predicted: f64 = base.iter().map(|p| p.1).sum();

    let h_at = |t: f64| deformed(chart, field, t).and_then(|c| total_h(&c, &nodes, k));
    let numeric = (h_at(dt)? - h_at(-dt)?) / (2.0 * dt);
    let half = (h_at(0.5 * dt)? - h_at(-0.5 * dt)?) / dt;
    let numeric_richardson = (4.0 * half - numeric) / 3.0;
    let ratio = (predicted.abs() > 1e-12).then(|| numeric / predicted);
    let agrees = (numeric - predicted).abs() <= 1e-3f64.max(0.01 * predicted.abs());
    Ok(FirstVariation {
        k,
        dt,
        quadrature_nodes: nodes.len(),
        total,
        numeric,
        numeric_richardson,
        predicted,
        ratio,
        agrees,
    })
}
