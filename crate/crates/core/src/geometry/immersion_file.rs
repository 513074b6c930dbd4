use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chart::{Ambient, DerivativeMode, Domain, ImmersionChart, ParamMap};
use super::{GeometryError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDomain {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub periodic: Vec<bool>,
}

/// An immersion sampled on a tensor grid. Nodes sit at `min + i·L/m` on periodic
/// axes and at `min + i·L/(m−1)` otherwise; `points` is row-major with the last
/// axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionFile {
    pub n: usize,
    pub p: usize,
    pub domain: FileDomain,
    pub grid: Vec<usize>,
    pub points: Vec<Vec<f64>>,
    /// Curvature of a round ambient sphere containing every point; absent for Euclidean space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_curvature: Option<f64>,
}

/// Nearest-node lookup into an [`ImmersionFile`]. Only grid nodes are meaningful.
#[derive(Debug, Clone)]
pub struct GridMap {
    file: ImmersionFile,
    strides: Vec<usize>,
}

impl GridMap {
    pub fn new(file: ImmersionFile) -> Result<Self> {
        let bad = |msg: String| Err(GeometryError::ImmersionFile(msg));
        let n = file.n;
        let d = &file.domain;
        if n == 0 || d.min.len() != n || d.max.len() != n || d.periodic.len() != n || file.grid.len() != n {
            return bad(format!("domain and grid must have {n} entries"));
        }
        if file.grid.iter().any(|&m| m < 3) {
            return bad("every grid axis needs at least 3 nodes".into());
        }
        let total: usize = file.grid.iter().product();
        if file.points.len() != total {
            return bad(format!("expected {total} points, found {}", file.points.len()));
        }
        if let Some(i) = file.points.iter().position(|x| x.len() != n + file.p) {
            return bad(format!("point {i} does not have {} coordinates", n + file.p));
        }
        if file.points.iter().flatten().any(|v| !v.is_finite()) {
            return bad("non-finite coordinate".into());
        }
        let mut strides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * file.grid[a + 1];
        }
        Ok(Self { file, strides })
    }

    fn node_index(&self, axis: usize, u: f64) -> usize {
        let d = &self.file.domain;
        let m = self.file.grid[axis];
        let t = (u - d.min[axis]) / (d.max[axis] - d.min[axis]);
        if d.periodic[axis] {
            ((t * m as f64).round() as i64).rem_euclid(m as i64) as usize
        } else {
            ((t * (m - 1) as f64).round().max(0.0) as usize).min(m - 1)
        }
    }
}

impl ParamMap for GridMap {
    fn param_dim(&self) -> usize {
        self.file.n
    }
    fn ambient_dim(&self) -> usize {
        self.file.n + self.file.p
    }
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let idx: usize = (0..self.file.n).map(|a| self.node_index(a, u[a]) * self.strides[a]).sum();
        self.file.points[idx].clone()
    }
}

impl ImmersionFile {
    pub fn into_chart(self, name: &str) -> Result<ImmersionChart> {
        let d = &self.domain;
        let domain = Domain::new(d.min.clone(), d.max.clone(), d.periodic.clone())
            .map_err(|e| GeometryError::ImmersionFile(e.to_string()))?;
        let steps: Vec<f64> = (0..self.n)
            .map(|a| {
                let m = self.grid[a] as f64;
                domain.length(a) / if domain.periodic[a] { m } else { m - 1.0 }
            })
            .collect();
        let ambient = match self.sphere_curvature {
            Some(curvature) => Ambient::Sphere { curvature },
            None => Ambient::Euclidean,
        };
        let grid = self.grid.clone();
        let chart = ImmersionChart::new(name, Arc::new(GridMap::new(self)?), domain, ambient)?;
        Ok(chart.with_mode(DerivativeMode::FiniteDifference { steps })?.with_node_grid(grid))
    }
}

pub fn load_immersion_file(path: &Path) -> Result<ImmersionChart> {
    let text = std::fs::read_to_string(path)?;
    let file: ImmersionFile = serde_json::from_str(&text).map_err(|e| GeometryError::ImmersionFile(e.to_string()))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("immersion_file");
    file.into_chart(name)
}
