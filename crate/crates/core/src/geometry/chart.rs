use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::jet::{Jet2, Real, MAX_PARAM_DIM};
use super::{GeometryError, Result};

/// A parametrization `u ↦ F(u)`, optionally with exact second-order jets and a
/// preferred normal frame.
pub trait ParamMap: Send + Sync {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> Vec<f64>;

    fn eval_jet(&self, _u: &[Jet2]) -> Option<Vec<Jet2>> {
        None
    }

    /// Orthonormal normals at `u`, if the chart has natural ones.
    fn normals(&self, _u: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }

    fn normals_jet(&self, _u: &[Jet2]) -> Option<Vec<Vec<Jet2>>> {
        None
    }
}

/// A map written once over [`Real`]; wrap it in [`Smooth`] to obtain a
/// [`ParamMap`] with analytic derivatives.
pub trait SmoothMap: Send + Sync {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn map<R: Real>(&self, u: &[R]) -> Vec<R>;

    fn normals<R: Real>(&self, _u: &[R]) -> Option<Vec<Vec<R>>> {
        None
    }
}

pub struct Smooth<M>(pub M);

impl<M: SmoothMap> ParamMap for Smooth<M> {
    fn param_dim(&self) -> usize {
        self.0.param_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        self.0.map(u)
    }
    fn eval_jet(&self, u: &[Jet2]) -> Option<Vec<Jet2>> {
        Some(self.0.map(u))
    }
    fn normals(&self, u: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.0.normals(u)
    }
    fn normals_jet(&self, u: &[Jet2]) -> Option<Vec<Vec<Jet2>>> {
        self.0.normals(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(min: Vec<f64>, max: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        if min.len() != max.len() || min.len() != periodic.len() {
            return Err(GeometryError::InvalidChart("domain bounds and flags differ in length".into()));
        }
        if min.iter().zip(&max).any(|(a, b)| !(a < b)) {
            return Err(GeometryError::InvalidChart("domain requires min < max on every axis".into()));
        }
        Ok(Self { min, max, periodic })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && (0..self.dim()).all(|i| {
                self.periodic[i] || (u[i] >= self.min[i] - 1e-12 && u[i] <= self.max[i] + 1e-12)
            })
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    /// Central differences with one step per parameter axis.
    FiniteDifference { steps: Vec<f64> },
}

impl DerivativeMode {
    pub fn uniform(step: f64, n: usize) -> Self {
        DerivativeMode::FiniteDifference { steps: vec![step; n] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Euclidean,
    /// The round sphere of constant curvature `curvature` centered at the origin.
    Sphere { curvature: f64 },
}

impl Ambient {
    pub fn curvature(&self) -> f64 {
        match self {
            Ambient::Euclidean => 0.0,
            Ambient::Sphere { curvature } => *curvature,
        }
    }
}

/// Position and first two coordinate derivatives of a chart at one point.
#[derive(Debug, Clone)]
pub struct PointDerivatives {
    pub x: Vec<f64>,
    /// `d1[i][c] = ∂_i F_c`
    pub d1: Vec<Vec<f64>>,
    /// `d2[i][j][c] = ∂_i ∂_j F_c`
    pub d2: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone)]
pub struct ImmersionChart {
    name: String,
    map: Arc<dyn ParamMap>,
    domain: Domain,
    mode: DerivativeMode,
    ambient: Ambient,
    closed: bool,
    node_only: Option<Vec<usize>>,
    rotation_plane: Option<(usize, usize)>,
}

impl fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("name", &self.name)
            .field("n", &self.dim())
            .field("ambient_dim", &self.ambient_dim())
            .field("domain", &self.domain)
            .field("mode", &self.mode)
            .field("ambient", &self.ambient)
            .finish()
    }
}

impl ImmersionChart {
    /// A chart with analytic derivatives when the map provides jets, central
    /// differences with step `1e−3` otherwise. Closed iff every axis is periodic.
    pub fn new(name: impl Into<String>, map: Arc<dyn ParamMap>, domain: Domain, ambient: Ambient) -> Result<Self> {
        let n = map.param_dim();
        if domain.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: domain.dim() });
        }
        if n == 0 || n > MAX_PARAM_DIM {
            return Err(GeometryError::InvalidChart(format!("intrinsic dimension {n} outside 1..={MAX_PARAM_DIM}")));
        }
        if map.ambient_dim() < n {
            return Err(GeometryError::InvalidChart("ambient dimension below intrinsic dimension".into()));
        }
        let analytic = map.eval_jet(&Jet2::seed(&domain.midpoint())).is_some();
        let mode = if analytic { DerivativeMode::Analytic } else { DerivativeMode::uniform(1e-3, n) };
        let closed = domain.periodic.iter().all(|&p| p);
        Ok(Self { name: name.into(), map, domain, mode, ambient, closed, node_only: None, rotation_plane: None })
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Result<Self> {
        match &mode {
            DerivativeMode::Analytic => {
                if self.map.eval_jet(&Jet2::seed(&self.domain.midpoint())).is_none() {
                    return Err(GeometryError::InvalidChart(format!("{} has no analytic derivatives", self.name)));
                }
            }
            DerivativeMode::FiniteDifference { steps } => {
                if steps.len() != self.dim() || steps.iter().any(|&h| !(h > 0.0)) {
                    return Err(GeometryError::InvalidChart("one positive step per axis required".into()));
                }
            }
        }
        self.mode = mode;
        Ok(self)
    }

    /// Marks the chart as covering a closed manifold, e.g. spherical
    /// coordinates whose non-periodic axes end in coordinate singularities.
    pub fn with_closed(mut self, closed: bool) -> Self {
        self.closed = closed;
        self
    }

    /// Declares the chart image invariant under rotations of the ambient plane `(i, j)`.
    pub fn with_rotation_plane(mut self, i: usize, j: usize) -> Self {
        self.rotation_plane = Some((i, j));
        self
    }

    pub fn rotation_plane(&self) -> Option<(usize, usize)> {
        self.rotation_plane
    }

    pub(crate) fn with_node_grid(mut self, grid: Vec<usize>) -> Self {
        self.node_only = Some(grid);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.map.param_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.ambient_dim()
    }

    /// Codimension inside the ambient space (the sphere itself when the ambient is a sphere).
    pub fn codim(&self) -> usize {
        let extra = matches!(self.ambient, Ambient::Sphere { .. }) as usize;
        self.ambient_dim() - self.dim() - extra
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn mode(&self) -> &DerivativeMode {
        &self.mode
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Grid sizes when the chart is only known at grid nodes.
    pub fn node_grid(&self) -> Option<&[usize]> {
        self.node_only.as_deref()
    }

    pub fn map(&self) -> &Arc<dyn ParamMap> {
        &self.map
    }

    pub(crate) fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: u.len() });
        }
        if !self.domain.contains(u) {
            return Err(GeometryError::OutOfDomain { u: u.to_vec() });
        }
        Ok(())
    }

    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_point(u)?;
        Ok(self.map.eval(u))
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.mode, DerivativeMode::Analytic)
    }

    pub fn derivatives(&self, u: &[f64]) -> Result<PointDerivatives> {
        self.check_point(u)?;
        let n = self.dim();
        match &self.mode {
            DerivativeMode::Analytic => {
                let jets = self.map.eval_jet(&Jet2::seed(u)).expect("checked at construction");
                Ok(PointDerivatives {
                    x: jets.iter().map(|j| j.v).collect(),
                    d1: (0..n).map(|i| jets.iter().map(|j| j.g[i]).collect()).collect(),
                    d2: (0..n).map(|i| (0..n).map(|k| jets.iter().map(|j| j.h[i][k]).collect()).collect()).collect(),
                })
            }
            DerivativeMode::FiniteDifference { steps } => Ok(central_differences(|p| self.map.eval(p), u, steps)),
        }
    }

    /// Chart-provided normals at `u`, if any.
    pub fn natural_normals(&self, u: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.map.normals(u)
    }

    /// Largest mismatch of `F` across identified boundaries of periodic axes,
    /// probed at the domain midpoint.
    pub fn periodicity_defect(&self) -> f64 {
        let mid = self.domain.midpoint();
        let mut worst: f64 = 0.0;
        for axis in (0..self.dim()).filter(|&a| self.domain.periodic[a]) {
            let (mut lo, mut hi) = (mid.clone(), mid.clone());
            lo[axis] = self.domain.min[axis];
            hi[axis] = self.domain.max[axis];
            let (a, b) = (self.map.eval(&lo), self.map.eval(&hi));
            worst = worst.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
        worst
    }
}

/// Second-order central differences of a vector-valued function.
pub(crate) fn central_differences<F: Fn(&[f64]) -> Vec<f64>>(f: F, u: &[f64], steps: &[f64]) -> PointDerivatives {
    let n = u.len();
    let x = f(u);
    let m = x.len();
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = u.to_vec();
        for &(axis, delta) in moves {
            p[axis] += delta;
        }
        f(&p)
    };
    let mut d1 = vec![vec![0.0; m]; n];
    let mut d2 = vec![vec![vec![0.0; m]; n]; n];
    for i in 0..n {
        let h = steps[i];
        let plus = shifted(&[(i, h)]);
        let minus = shifted(&[(i, -h)]);
        for c in 0..m {
            d1[i][c] = (plus[c] - minus[c]) / (2.0 * h);
            d2[i][i][c] = (plus[c] - 2.0 * x[c] + minus[c]) / (h * h);
        }
        for j in 0..i {
            let k = steps[j];
            let pp = shifted(&[(i, h), (j, k)]);
            let pm = shifted(&[(i, h), (j, -k)]);
            let mp = shifted(&[(i, -h), (j, k)]);
            let mm = shifted(&[(i, -h), (j, -k)]);
            for c in 0..m {
                let v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * k);
                d2[i][j][c] = v;
                d2[j][i][c] = v;
            }
        }
    }
    PointDerivatives { x, d1, d2 }
}
