//! Exact and floating-point complex matrix algebra on `n`-qubit spaces.

pub mod density;
pub mod ket;
pub mod matrix;
pub mod projection;
pub mod real;
pub mod scalar;
pub(crate) mod sparse;
pub mod spectral;

pub use density::{projection_weight, state_project, DensityMatrix};
pub use ket::Ket;
pub use matrix::{common_backend, Backend, ComplexMatrix};
pub use projection::{projection_join, SpecialProjection};
pub use real::Real;
pub use scalar::{Complex64, GaussianRational, Scalar};
pub use spectral::{fidelity, trace_distance, TraceDistanceMode};

/// Tolerance for positivity, idempotence and rank decisions.
pub const TOL_EIG: f64 = 1e-9;

/// Tolerance for entrywise equality of float matrices.
pub const TOL_ENTRY: f64 = 1e-12;
