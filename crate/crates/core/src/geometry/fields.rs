//! Scalar fields on a chart, given as functions of the parameters `u` and the
//! ambient position `x = F(u)`.

use std::sync::Arc;

use serde::Serialize;

use super::chart::{central_differences, DerivativeMode, ImmersionChart};
use super::jet::{Jet2, Real};
use super::Result;

pub trait ScalarField: Send + Sync {
    fn value(&self, u: &[f64], x: &[f64]) -> f64;
    fn value_jet(&self, u: &[Jet2], x: &[Jet2]) -> Jet2;
}

/// A field written once over [`Real`].
pub trait SmoothField: Send + Sync {
    fn eval<R: Real>(&self, u: &[R], x: &[R]) -> R;
}

impl<T: SmoothField> ScalarField for T {
    fn value(&self, u: &[f64], x: &[f64]) -> f64 {
        self.eval(u, x)
    }
    fn value_jet(&self, u: &[Jet2], x: &[Jet2]) -> Jet2 {
        self.eval(u, x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl SmoothField for Constant {
    fn eval<R: Real>(&self, u: &[R], _x: &[R]) -> R {
        u[0].cst(self.0)
    }
}

/// `f(x) = c0 + ⟨w, x⟩`; with `c0 = 0` this is the height function `f_w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientLinear {
    pub c0: f64,
    pub w: Vec<f64>,
}

impl AmbientLinear {
    pub fn coordinate(i: usize, ambient_dim: usize) -> Self {
        let mut w = vec![0.0; ambient_dim];
        w[i] = 1.0;
        Self { c0: 0.0, w }
    }
}

impl SmoothField for AmbientLinear {
    fn eval<R: Real>(&self, u: &[R], x: &[R]) -> R {
        x.iter().zip(&self.w).fold(u[0].cst(self.c0), |acc, (&xi, &wi)| acc + xi * wi)
    }
}

/// `f(u) = Σ c·cos(⟨m, u⟩ + φ)` with integer frequency vectors `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTrig {
    pub terms: Vec<(f64, Vec<i32>, f64)>,
}

impl SmoothField for ParamTrig {
    fn eval<R: Real>(&self, u: &[R], _x: &[R]) -> R {
        self.terms.iter().fold(u[0].cst(0.0), |acc, (c, m, phase)| {
            let arg = u.iter().zip(m).fold(u[0].cst(*phase), |a, (&ui, &mi)| a + ui * f64::from(mi));
            acc + arg.cos() * *c
        })
    }
}

#[derive(Clone)]
pub struct Product(pub Arc<dyn ScalarField>, pub Arc<dyn ScalarField>);

impl ScalarField for Product {
    fn value(&self, u: &[f64], x: &[f64]) -> f64 {
        self.0.value(u, x) * self.1.value(u, x)
    }
    fn value_jet(&self, u: &[Jet2], x: &[Jet2]) -> Jet2 {
        self.0.value_jet(u, x) * self.1.value_jet(u, x)
    }
}

/// Value, coordinate gradient and coordinate Hessian of a scalar field.
#[derive(Debug, Clone)]
pub struct ScalarDerivatives {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

impl ImmersionChart {
    pub fn scalar_derivatives(&self, f: &dyn ScalarField, u: &[f64]) -> Result<ScalarDerivatives> {
        self.check_point(u)?;
        let n = self.dim();
        match self.mode() {
            DerivativeMode::Analytic => {
                let uj = Jet2::seed(u);
                let xj = self.map().eval_jet(&uj).expect("analytic chart");
                let j = f.value_jet(&uj, &xj);
                Ok(ScalarDerivatives {
                    value: j.v,
                    grad: j.g[..n].to_vec(),
                    hess: (0..n).map(|i| j.h[i][..n].to_vec()).collect(),
                })
            }
            DerivativeMode::FiniteDifference { steps } => {
                let d = central_differences(|p| vec![f.value(p, &self.map().eval(p))], u, steps);
                Ok(ScalarDerivatives {
                    value: d.x[0],
                    grad: d.d1.iter().map(|v| v[0]).collect(),
                    hess: d.d2.iter().map(|row| row.iter().map(|v| v[0]).collect()).collect(),
                })
            }
        }
    }
}
