//! Immersed submanifolds given by charts `F: U ⊂ ℝ^n → ℝ^N`, and the geometric
//! checks built on the pointwise curvature algebra: (2k)-minimality, ℓ_2k
//! harmonicity of coordinate functions, the sphere eigen-characterization and
//! the first variation of the total Gauss-Bonnet curvature.

mod catalog;
mod chart;
mod checks;
mod fields;
mod frame;
mod immersion_file;
mod jet;
mod quadrature;
mod variation;

use thiserror::Error;

use crate::double_form::AlgebraError;

pub use catalog::{
    catalog_chart, catalog_names, catenoid, clifford_torus, flat_torus, graph_of_polynomial, kahler_graph,
    resolve_immersion, round_sphere, small_sphere_in_sphere,
};
pub use chart::{Ambient, DerivativeMode, Domain, ImmersionChart, ParamMap, PointDerivatives, Smooth, SmoothMap};
pub use checks::{
    coordinate_harmonicity, ell2k_at, hessian_at, integral_identities, minimality_residual, pointwise_product_rule,
    riemann_at, second_fundamental_forms, sphere_eigen_check, HarmonicityReport, IntegralReport, InvariantReport,
    SampleRecord, SphereCheckReport, SweepOptions, Verdict,
};
pub use fields::{AmbientLinear, Constant, ParamTrig, Product, ScalarDerivatives, ScalarField, SmoothField};
pub use frame::{frame_at, PointFrame};
pub use immersion_file::{load_immersion_file, FileDomain, GridMap, ImmersionFile};
pub use jet::{Jet2, Real, MAX_PARAM_DIM};
pub use quadrature::{quadrature_nodes, sample_grid, QuadratureNode};
pub use variation::{first_variation, FirstVariation, PerturbedMap, VariationField};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate immersion at u = {u:?} (normalized Gram determinant {gram:e})")]
    Degenerate { u: Vec<f64>, gram: f64 },
    #[error("point {u:?} lies outside the chart domain")]
    OutOfDomain { u: Vec<f64> },
    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("order k = {k} requires {requirement} for intrinsic dimension {n}")]
    InvalidOrder { k: usize, n: usize, requirement: &'static str },
    #[error("the sample list is empty")]
    EmptySamples,
    #[error("point F({u:?}) has norm {norm} instead of 1")]
    NotOnSphere { u: Vec<f64>, norm: f64 },
    #[error("invalid variation: {0}")]
    InvalidVariation(String),
    #[error("invalid ambient: {0}")]
    InvalidAmbient(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("unknown immersion '{0}'")]
    UnknownImmersion(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed immersion file: {0}")]
    ImmersionFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
