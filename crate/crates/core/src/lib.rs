//! Double-form calculus and generalized minimal submanifolds.
//!
//! The algebra layer ([`double_form`], [`symm`], [`curvature`]) works in an
//! orthonormal frame with coefficients in any [`Scalar`] (floating or exact
//! rational). The [`geometry`] layer evaluates the invariants on concrete
//! parametrized immersions and runs the minimality and first-variation checks.

pub mod curvature;
pub mod double_form;
pub mod geometry;
pub mod identities;
pub mod multiindex;
pub mod scalar;
pub mod symm;

pub use curvature::{CurvatureTensor, Definiteness, LovelockTensor};
pub use double_form::{AlgebraError, DoubleForm, SymBilinearForm};
pub use multiindex::{enumerate_multiindices, IndexError, MultiIndex, Sign};
pub use scalar::Scalar;
pub use symm::SymmetricFunctionTable;
