use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use itertools::Itertools;
use serde::Serialize;

use super::chart::ImmersionChart;
use super::{GeometryError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureNode {
    pub u: Vec<f64>,
    pub weight: f64,
}

/// Coordinates of grid-file nodes along one axis: `m` nodes with the upper end
/// identified on periodic axes, `m` nodes including both ends otherwise.
pub(crate) fn node_coordinates(min: f64, max: f64, m: usize, periodic: bool) -> Vec<f64> {
    let len = max - min;
    if periodic {
        (0..m).map(|i| min + len * i as f64 / m as f64).collect()
    } else {
        (0..m).map(|i| min + len * i as f64 / (m - 1) as f64).collect()
    }
}

fn axis_samples(chart: &ImmersionChart, axis: usize, m: usize) -> Vec<f64> {
    let d = chart.domain();
    let (min, max, periodic) = (d.min[axis], d.max[axis], d.periodic[axis]);
    if let Some(grid) = chart.node_grid() {
        let nodes = node_coordinates(min, max, grid[axis], periodic);
        return if periodic { nodes } else { nodes[1..nodes.len() - 1].to_vec() };
    }
    let len = max - min;
    if periodic {
        (0..m).map(|i| min + len * i as f64 / m as f64).collect()
    } else {
        (0..m).map(|i| min + len * (i as f64 + 0.5) / m as f64).collect()
    }
}

/// A tensor grid of sample points, last axis fastest: `m` equispaced points on
/// periodic axes, `m` cell midpoints on the others. Charts known only at grid
/// nodes return their interior nodes and ignore `m`.
pub fn sample_grid(chart: &ImmersionChart, m: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = (0..chart.dim()).map(|a| axis_samples(chart, a, m.max(1))).collect();
    axes.iter().multi_cartesian_product().map(|p| p.into_iter().copied().collect()).collect()
}

/// Product quadrature over a closed chart: the trapezoid rule on periodic axes
/// and `m`-point Gauss-Legendre on the remaining (coordinate-singular) axes.
pub fn quadrature_nodes(chart: &ImmersionChart, m: usize) -> Result<Vec<QuadratureNode>> {
    if !chart.is_closed() {
        return Err(GeometryError::InvalidVariation(format!(
            "{} does not cover a closed manifold, so it has no closed quadrature",
            chart.name()
        )));
    }
    let d = chart.domain();
    let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(chart.dim());
    for axis in 0..chart.dim() {
        let (min, max) = (d.min[axis], d.max[axis]);
        if d.periodic[axis] {
            let pts = axis_samples(chart, axis, m);
            let w = (max - min) / pts.len() as f64;
            axes.push(pts.into_iter().map(|x| (x, w)).collect());
        } else {
            if chart.node_grid().is_some() {
                return Err(GeometryError::InvalidVariation(
                    "grid charts support quadrature on periodic axes only".into(),
                ));
            }
            let m = NonZeroUsize::new(m).ok_or_else(|| GeometryError::InvalidParameter("grid must be positive".into()))?;
            let rule = GaussLegendre::new(m);
            let half = 0.5 * (max - min);
            axes.push(rule.as_node_weight_pairs().iter().map(|&(x, w)| (min + half * (x + 1.0), half * w)).collect());
        }
    }
    Ok(axes
        .iter()
        .multi_cartesian_product()
        .map(|p| QuadratureNode { u: p.iter().map(|(x, _)| *x).collect(), weight: p.iter().map(|(_, w)| *w).product() })
        .collect())
}
