use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use super::chart::{Ambient, DerivativeMode, Domain, ImmersionChart, Smooth, SmoothMap};
use super::immersion_file::load_immersion_file;
use super::jet::Real;
use super::{GeometryError, Result};

const NAMES: &[&str] = &[
    "round_sphere",
    "small_sphere_in_sphere",
    "flat_torus",
    "clifford_torus",
    "catenoid",
    "kahler_graph",
    "graph_of_polynomial",
];

pub fn catalog_names() -> &'static [&'static str] {
    NAMES
}

/// Unit sphere coordinates `(φ_1, …, φ_{n−1}, θ)` scaled by `radius`.
fn sphere_coords<R: Real>(u: &[R], radius: f64) -> Vec<R> {
    let n = u.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut sines = u[0].cst(radius);
    for &phi in &u[..n - 1] {
        out.push(sines * phi.cos());
        sines = sines * phi.sin();
    }
    out.push(sines * u[n - 1].cos());
    out.push(sines * u[n - 1].sin());
    out
}

fn sphere_domain(n: usize) -> Domain {
    let mut max = vec![PI; n];
    max[n - 1] = 2.0 * PI;
    let mut periodic = vec![false; n];
    periodic[n - 1] = true;
    Domain::new(vec![0.0; n], max, periodic).expect("valid box")
}

struct RoundSphere {
    n: usize,
    r: f64,
}

impl SmoothMap for RoundSphere {
    fn param_dim(&self) -> usize {
        self.n
    }
    fn ambient_dim(&self) -> usize {
        self.n + 1
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        sphere_coords(u, self.r)
    }
    fn normals<R: Real>(&self, u: &[R]) -> Option<Vec<Vec<R>>> {
        Some(vec![sphere_coords(u, 1.0)])
    }
}

/// The round sphere `S^n(r) ⊂ ℝ^{n+1}` in spherical coordinates, outward normal.
pub fn round_sphere(n: usize, r: f64) -> Result<ImmersionChart> {
    if n == 0 || !(r > 0.0) {
        return Err(GeometryError::InvalidParameter("round_sphere needs n ≥ 1 and r > 0".into()));
    }
    let chart = ImmersionChart::new("round_sphere", Arc::new(Smooth(RoundSphere { n, r })), sphere_domain(n), Ambient::Euclidean)?;
    Ok(chart.with_closed(true).with_rotation_plane(n - 1, n))
}

struct SmallSphere {
    n: usize,
    r: f64,
}

impl SmoothMap for SmallSphere {
    fn param_dim(&self) -> usize {
        self.n
    }
    fn ambient_dim(&self) -> usize {
        self.n + 2
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        let mut x = sphere_coords(u, self.r);
        x.push(u[0].cst((1.0 - self.r * self.r).sqrt()));
        x
    }
    fn normals<R: Real>(&self, u: &[R]) -> Option<Vec<Vec<R>>> {
        let s = (1.0 - self.r * self.r).sqrt();
        let unit = sphere_coords(u, 1.0);
        let mut nu: Vec<R> = unit.iter().map(|&v| v * s).collect();
        nu.push(u[0].cst(-self.r));
        Some(vec![self.map(u), nu])
    }
}

/// The parallel sphere `S^n(r) × {√(1−r²)} ⊂ S^{n+1}(1) ⊂ ℝ^{n+2}`; `r = 1` is
/// the totally geodesic equator.
pub fn small_sphere_in_sphere(n: usize, r: f64) -> Result<ImmersionChart> {
    if n == 0 || !(r > 0.0 && r <= 1.0) {
        return Err(GeometryError::InvalidParameter("small_sphere_in_sphere needs n ≥ 1 and 0 < r ≤ 1".into()));
    }
    let chart = ImmersionChart::new(
        "small_sphere_in_sphere",
        Arc::new(Smooth(SmallSphere { n, r })),
        sphere_domain(n),
        Ambient::Sphere { curvature: 1.0 },
    )?;
    Ok(chart.with_closed(true).with_rotation_plane(n - 1, n))
}

struct FlatTorus {
    radii: Vec<f64>,
    scale: f64,
}

impl SmoothMap for FlatTorus {
    fn param_dim(&self) -> usize {
        self.radii.len()
    }
    fn ambient_dim(&self) -> usize {
        2 * self.radii.len()
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        u.iter()
            .zip(&self.radii)
            .flat_map(|(&t, &r)| [t.cos() * (r * self.scale), t.sin() * (r * self.scale)])
            .collect()
    }
    fn normals<R: Real>(&self, u: &[R]) -> Option<Vec<Vec<R>>> {
        let m = self.radii.len();
        let zero = u[0].cst(0.0);
        Some(
            (0..m)
                .map(|j| {
                    let mut v = vec![zero; 2 * m];
                    v[2 * j] = u[j].cos();
                    v[2 * j + 1] = u[j].sin();
                    v
                })
                .collect(),
        )
    }
}

fn torus_domain(m: usize) -> Domain {
    Domain::new(vec![0.0; m], vec![2.0 * PI; m], vec![true; m]).expect("valid box")
}

/// The product of circles of the given radii, `T^m ⊂ ℝ^{2m}`.
pub fn flat_torus(radii: &[f64]) -> Result<ImmersionChart> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(GeometryError::InvalidParameter("flat_torus needs positive radii".into()));
    }
    let map = FlatTorus { radii: radii.to_vec(), scale: 1.0 };
    let chart = ImmersionChart::new("flat_torus", Arc::new(Smooth(map)), torus_domain(radii.len()), Ambient::Euclidean)?;
    Ok(chart.with_rotation_plane(0, 1))
}

struct CliffordNormals(FlatTorus);

impl SmoothMap for CliffordNormals {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        4
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        self.0.map(u)
    }
    fn normals<R: Real>(&self, u: &[R]) -> Option<Vec<Vec<R>>> {
        let x = self.map(u);
        let nu = vec![x[0], x[1], -x[2], -x[3]];
        Some(vec![x, nu])
    }
}

/// `(cos θ_1, sin θ_1, cos θ_2, sin θ_2)/√2`, the minimal Clifford torus in `S³`.
pub fn clifford_torus() -> Result<ImmersionChart> {
    let map = CliffordNormals(FlatTorus { radii: vec![1.0, 1.0], scale: std::f64::consts::FRAC_1_SQRT_2 });
    let chart = ImmersionChart::new(
        "clifford_torus",
        Arc::new(Smooth(map)),
        torus_domain(2),
        Ambient::Sphere { curvature: 1.0 },
    )?;
    Ok(chart.with_rotation_plane(0, 1))
}

struct Catenoid;

impl SmoothMap for Catenoid {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        let c = u[1].cosh();
        vec![c * u[0].cos(), c * u[0].sin(), u[1]]
    }
}

/// `(cosh v cos u, cosh v sin u, v)` for `|v| ≤ vmax`.
pub fn catenoid(vmax: f64) -> Result<ImmersionChart> {
    let domain = Domain::new(vec![0.0, -vmax], vec![2.0 * PI, vmax], vec![true, false])?;
    let chart = ImmersionChart::new("catenoid", Arc::new(Smooth(Catenoid)), domain, Ambient::Euclidean)?;
    Ok(chart.with_rotation_plane(0, 1))
}

struct KahlerGraph;

impl SmoothMap for KahlerGraph {
    fn param_dim(&self) -> usize {
        4
    }
    fn ambient_dim(&self) -> usize {
        6
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        let (x1, y1, x2, y2) = (u[0], u[1], u[2], u[3]);
        vec![x1, y1, x2, y2, x1 * x2 - y1 * y2, x1 * y2 + y1 * x2]
    }
    /// `(−∇ Re f, 1, 0)` and `(−∇ Im f, 0, 1)` for `f = zw`, orthogonal and of equal length by Cauchy-Riemann.
    fn normals<R: Real>(&self, u: &[R]) -> Option<Vec<Vec<R>>> {
        let (x1, y1, x2, y2) = (u[0], u[1], u[2], u[3]);
        let (zero, one) = (x1.cst(0.0), x1.cst(1.0));
        let scale = one / (one + x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2).sqrt();
        Some(vec![
            vec![-x2, y2, -x1, y1, one, zero].into_iter().map(|v| v * scale).collect(),
            vec![-y2, -x2, -y1, -x1, zero, one].into_iter().map(|v| v * scale).collect(),
        ])
    }
}

/// The complex graph `(z, w) ↦ (z, w, zw)` of `ℂ² → ℂ³`, on `[−extent, extent]⁴`.
pub fn kahler_graph(extent: f64) -> Result<ImmersionChart> {
    let domain = Domain::new(vec![-extent; 4], vec![extent; 4], vec![false; 4])?;
    ImmersionChart::new("kahler_graph", Arc::new(Smooth(KahlerGraph)), domain, Ambient::Euclidean)
}

struct Paraboloid {
    a: f64,
}

impl SmoothMap for Paraboloid {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<R: Real>(&self, u: &[R]) -> Vec<R> {
        vec![u[0], u[1], (u[0] * u[0] + u[1] * u[1]) * self.a]
    }
}

/// The graph of `a(u_1² + u_2²)` over `[−1, 1]²`.
pub fn graph_of_polynomial(a: f64) -> Result<ImmersionChart> {
    let domain = Domain::new(vec![-1.0; 2], vec![1.0; 2], vec![false; 2])?;
    let chart = ImmersionChart::new("graph_of_polynomial", Arc::new(Smooth(Paraboloid { a })), domain, Ambient::Euclidean)?;
    Ok(chart.with_rotation_plane(0, 1))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.parse().map_err(|_| GeometryError::InvalidParameter(format!("{key}={value} is not a number")))
}

/// Builds a catalog chart from `key=value` parameters, e.g. `round_sphere n=3 r=1`
/// or `flat_torus r1=1 r2=2 r3=1`. `mode=fd` with `h=…` selects finite differences.
pub fn catalog_chart(name: &str, params: &[(String, String)]) -> Result<ImmersionChart> {
    let mut n: Option<usize> = None;
    let mut r: Option<f64> = None;
    let mut radii: Vec<(usize, f64)> = Vec::new();
    let mut scalar: Option<f64> = None;
    let mut fd = false;
    let mut h = 1e-3;
    for (key, value) in params {
        match key.as_str() {
            "n" => {
                n = Some(value.parse().map_err(|_| GeometryError::InvalidParameter(format!("n={value}")))?);
            }
            "r" => r = Some(parse_f64(key, value)?),
            "a" | "extent" | "vmax" => scalar = Some(parse_f64(key, value)?),
            "h" => h = parse_f64(key, value)?,
            "mode" => match value.as_str() {
                "analytic" => fd = false,
                "fd" | "finite_difference" => fd = true,
                other => return Err(GeometryError::InvalidParameter(format!("mode={other}"))),
            },
            k if k.starts_with('r') && k[1..].parse::<usize>().is_ok() => {
                radii.push((k[1..].parse().expect("checked"), parse_f64(key, value)?));
            }
            other => return Err(GeometryError::InvalidParameter(format!("unknown key '{other}' for {name}"))),
        }
    }
    let chart = match name {
        "round_sphere" => round_sphere(n.unwrap_or(3), r.unwrap_or(1.0))?,
        "small_sphere_in_sphere" => small_sphere_in_sphere(n.unwrap_or(2), r.unwrap_or(0.5))?,
        "flat_torus" => {
            radii.sort_by_key(|&(i, _)| i);
            let mut values: Vec<f64> = radii.iter().map(|&(_, v)| v).collect();
            if values.is_empty() {
                values = vec![1.0; n.unwrap_or(2)];
            }
            flat_torus(&values)?
        }
        "clifford_torus" => clifford_torus()?,
        "catenoid" => catenoid(scalar.unwrap_or(1.0))?,
        "kahler_graph" => kahler_graph(scalar.unwrap_or(1.0))?,
        "graph_of_polynomial" => graph_of_polynomial(scalar.unwrap_or(1.0))?,
        other => return Err(GeometryError::UnknownImmersion(other.to_string())),
    };
    if fd {
        let n = chart.dim();
        chart.with_mode(DerivativeMode::uniform(h, n))
    } else {
        Ok(chart)
    }
}

/// A catalog name, or a path to an immersion JSON file.
pub fn resolve_immersion(spec: &str, params: &[(String, String)]) -> Result<ImmersionChart> {
    if NAMES.contains(&spec) {
        return catalog_chart(spec, params);
    }
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.exists() {
        if !params.is_empty() {
            return Err(GeometryError::InvalidParameter("immersion files take no parameters".into()));
        }
        return load_immersion_file(path);
    }
    Err(GeometryError::UnknownImmersion(spec.to_string()))
}
