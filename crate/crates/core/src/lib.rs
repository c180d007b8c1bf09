//! Quantum algorithmic randomness at desk scale.
//!
//! States of the infinite qubit chain are represented by coherent sequences
//! of density matrices, quantum Σ₁ sets by increasing sequences of
//! projections, and quantum Martin-Löf and Solovay tests by sequences of
//! those. On top sit the correspondence with classical tests, circuit-based
//! quantum Kolmogorov complexity and entropy statistics.

pub mod bits;
pub mod bridge;
pub mod cantor;
pub mod compression;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod randomness;
pub mod states;

pub use bits::BitString;
pub use error::{Error, Result};
pub use linalg::{
    Backend, ComplexMatrix, DensityMatrix, GaussianRational, Ket, Real, SpecialProjection, TOL_EIG,
    TOL_ENTRY,
};
