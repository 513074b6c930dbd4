use serde::Serialize;

use super::chart::{Ambient, ImmersionChart, PointDerivatives};
use super::fields::ScalarDerivatives;
use super::{GeometryError, Result};
use crate::curvature::{gauss_equation, CurvatureTensor};
use crate::double_form::SymBilinearForm;

/// Columns whose normalized Gram determinant falls below this are rank deficient.
const GRAM_THRESHOLD: f64 = 1e-10;

/// The induced geometry of a chart at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct PointFrame {
    pub u: Vec<f64>,
    pub position: Vec<f64>,
    /// Orthonormal tangent vectors `e_a = Σ_i E_ai ∂_i F`.
    pub tangent: Vec<Vec<f64>>,
    /// Orthonormal normal vectors; for sphere charts the radial direction comes first.
    pub normal: Vec<Vec<f64>>,
    pub metric: Vec<Vec<f64>>,
    pub metric_inv: Vec<Vec<f64>>,
    /// `christoffel[k][i][j] = Γ^k_ij`
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// `E` with rows expressing the orthonormal frame in coordinate vectors.
    pub frame_change: Vec<Vec<f64>>,
    #[serde(skip)]
    det_metric: f64,
    #[serde(skip)]
    first_derivatives: Vec<Vec<f64>>,
    #[serde(skip)]
    second_derivatives: Vec<Vec<Vec<f64>>>,
    #[serde(skip)]
    radial_first: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `g = L Lᵀ` with `L` lower triangular, returned with `L⁻¹`; `None` unless `g` is positive definite.
fn cholesky(g: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = g.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s = g[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut inv = vec![vec![0.0; n]; n];
    for i in 0..n {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            inv[i][j] = -(j..i).map(|k| l[i][k] * inv[k][j]).sum::<f64>() / l[i][i];
        }
    }
    Some((l, inv))
}

/// Completes an orthonormal family to a basis, adding canonical vectors in
/// order of largest residual.
fn complete_basis(mut basis: Vec<Vec<f64>>, target: usize) -> Vec<Vec<f64>> {
    let dim = target;
    let start = basis.len();
    while basis.len() < target {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for c in 0..dim {
            let mut v = vec![0.0; dim];
            v[c] = 1.0;
            // two passes keep the residual orthogonal to working precision
            for _ in 0..2 {
                for b in &basis {
                    let d = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn + 1e-12) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("dim > 0");
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    basis.split_off(start)
}

/// Builds the frame of `chart` at `u`.
pub fn frame_at(chart: &ImmersionChart, u: &[f64]) -> Result<PointFrame> {
    let d = chart.derivatives(u)?;
    build_frame(chart, u, d)
}

pub(crate) fn build_frame(chart: &ImmersionChart, u: &[f64], d: PointDerivatives) -> Result<PointFrame> {
    let n = chart.dim();
    let big_n = chart.ambient_dim();
    let g: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dot(&d.d1[i], &d.d1[j])).collect()).collect();
    let factor = cholesky(&g);
    let diag_product: f64 = (0..n).map(|i| g[i][i]).product();
    let gram = match &factor {
        Some((l, _)) if diag_product > 1e-300 => (0..n).map(|i| l[i][i] * l[i][i]).product::<f64>() / diag_product,
        _ => 0.0,
    };
    if !(gram >= GRAM_THRESHOLD) {
        return Err(GeometryError::Degenerate { u: u.to_vec(), gram });
    }
    let (l, e) = factor.expect("checked above");
    let det = (0..n).map(|i| l[i][i] * l[i][i]).product::<f64>();
    let g_inv: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| (i.max(j)..n).map(|a| e[a][i] * e[a][j]).sum()).collect()).collect();

    let tangent: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..big_n).map(|c| (0..=a).map(|i| e[a][i] * d.d1[i][c]).sum()).collect())
        .collect();

    let radial_first = matches!(chart.ambient(), Ambient::Sphere { .. });
    let normal = match chart.natural_normals(u) {
        Some(ns) if ns.len() == big_n - n && normals_are_valid(&ns, &tangent) => ns,
        _ => {
            let mut seed = tangent.clone();
            if radial_first {
                let r = dot(&d.x, &d.x).sqrt();
                seed.push(d.x.iter().map(|x| x / r).collect());
            }
            let mut completed = complete_basis(seed.clone(), big_n);
            if radial_first {
                let mut normals = vec![seed.pop().expect("radial")];
                normals.append(&mut completed);
                normals
            } else {
                completed
            }
        }
    };

    // Γ^k_ij = g^{kl} ⟨∂_ij F, ∂_l F⟩, the metric-derivative formula for an immersion
    let mut christoffel = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let lowered: Vec<f64> = (0..n).map(|l| dot(&d.d2[i][j], &d.d1[l])).collect();
            for k in 0..n {
                christoffel[k][i][j] = (0..n).map(|l| g_inv[k][l] * lowered[l]).sum();
            }
        }
    }

    Ok(PointFrame {
        u: u.to_vec(),
        position: d.x,
        tangent,
        normal,
        metric: g,
        metric_inv: g_inv,
        christoffel,
        frame_change: e,
        det_metric: det,
        first_derivatives: d.d1,
        second_derivatives: d.d2,
        radial_first,
    })
}

fn normals_are_valid(normals: &[Vec<f64>], tangent: &[Vec<f64>]) -> bool {
    normals.iter().enumerate().all(|(a, na)| {
        tangent.iter().all(|t| dot(na, t).abs() < 1e-9)
            && normals.iter().enumerate().all(|(b, nb)| (dot(na, nb) - if a == b { 1.0 } else { 0.0 }).abs() < 1e-9)
    })
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.tangent.len()
    }

    /// `√det g`, the density of the Riemannian measure in chart coordinates.
    pub fn volume_density(&self) -> f64 {
        self.det_metric.sqrt()
    }

    /// Pulls a coordinate bilinear form back to the orthonormal frame.
    fn to_orthonormal(&self, m: impl Fn(usize, usize) -> f64) -> SymBilinearForm {
        let n = self.dim();
        let e = &self.frame_change;
        let mut coord = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                coord[i][j] = m(i, j);
                coord[j][i] = coord[i][j];
            }
        }
        // E is lower triangular, so row a only involves coordinates 0..=a
        let half: Vec<Vec<f64>> =
            (0..n).map(|a| (0..n).map(|j| (0..=a).map(|i| e[a][i] * coord[i][j]).sum()).collect()).collect();
        let mut rows = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a..n {
                rows[a][b] = (0..=b).map(|j| half[a][j] * e[b][j]).sum();
                rows[b][a] = rows[a][b];
            }
        }
        SymBilinearForm::from_matrix(rows).expect("square")
    }

    /// `B_N(e_a, e_b) = −⟨∂²F(e_a, e_b), N⟩`, the sign fixed by `Hess f_v = −⟨B, v⟩`.
    pub fn second_fundamental_form(&self, normal: &[f64]) -> SymBilinearForm {
        self.to_orthonormal(|i, j| -dot(&self.second_derivatives[i][j], normal))
    }

    /// One form per normal in [`Self::normal`].
    pub fn second_fundamental_forms(&self) -> Vec<SymBilinearForm> {
        self.normal.iter().map(|nv| self.second_fundamental_form(nv)).collect()
    }

    /// Indices into [`Self::normal`] of the normals inside the given ambient.
    pub fn normal_range(&self, ambient: Ambient) -> Result<std::ops::Range<usize>> {
        match ambient {
            Ambient::Euclidean => Ok(0..self.normal.len()),
            Ambient::Sphere { curvature } => {
                if !self.radial_first {
                    return Err(GeometryError::InvalidAmbient("chart is not declared to lie in a sphere".into()));
                }
                let r2 = dot(&self.position, &self.position);
                if (r2 * curvature - 1.0).abs() > 1e-8 {
                    return Err(GeometryError::InvalidAmbient(format!(
                        "|F|² = {r2} does not match the sphere of curvature {curvature}"
                    )));
                }
                Ok(1..self.normal.len())
            }
        }
    }

    /// The curvature tensor through the Gauss equation for the given ambient.
    pub fn riemann(&self, ambient: Ambient) -> Result<CurvatureTensor> {
        let forms: Vec<SymBilinearForm> =
            self.normal_range(ambient)?.map(|a| self.second_fundamental_form(&self.normal[a])).collect();
        Ok(gauss_equation(self.dim(), &forms, &ambient.curvature())?)
    }

    /// Intrinsic curvature: the Gauss equation in the Euclidean space containing the chart.
    pub fn intrinsic_riemann(&self) -> Result<CurvatureTensor> {
        self.riemann(Ambient::Euclidean)
    }

    /// Covariant Hessian `∂_ij f − Γ^k_ij ∂_k f` in the orthonormal frame.
    pub fn hessian(&self, f: &ScalarDerivatives) -> SymBilinearForm {
        let n = self.dim();
        self.to_orthonormal(|i, j| f.hess[i][j] - (0..n).map(|k| self.christoffel[k][i][j] * f.grad[k]).sum::<f64>())
    }

    /// Covariant Hessians of the ambient coordinate functions `x_c ∘ F`.
    pub fn coordinate_hessians(&self) -> Vec<SymBilinearForm> {
        let n = self.dim();
        (0..self.position.len())
            .map(|c| {
                self.to_orthonormal(|i, j| {
                    self.second_derivatives[i][j][c]
                        - (0..n).map(|k| self.christoffel[k][i][j] * self.first_derivatives[k][c]).sum::<f64>()
                })
            })
            .collect()
    }

    /// Gradient components `df(e_a)` in the orthonormal frame.
    pub fn gradient(&self, f: &ScalarDerivatives) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|a| (0..n).map(|i| self.frame_change[a][i] * f.grad[i]).sum()).collect()
    }

    /// Largest deviation from orthonormality of the tangent and normal frames.
    pub fn orthonormality_defect(&self) -> f64 {
        let all: Vec<&Vec<f64>> = self.tangent.iter().chain(&self.normal).collect();
        let mut worst: f64 = 0.0;
        for (a, va) in all.iter().enumerate() {
            for (b, vb) in all.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot(va, vb) - expected).abs());
            }
        }
        worst
    }
}
