use num::{BigRational, One, Signed, Zero};

use super::ket::Ket;
use super::matrix::{common_backend, Backend, ComplexMatrix};
use super::projection::SpecialProjection;
use super::real::Real;
use super::spectral::eigenvalues;
use super::TOL_EIG;
use crate::bits::BitString;
use crate::error::{Error, Result};

/// A Hermitian, positive, unit-trace matrix on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Exact matrices must
    /// be exactly Hermitian with trace exactly 1; float matrices may deviate
    /// by [`TOL_EIG`]. Positivity is checked on eigenvalues in both cases.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = if matrix.is_exact() { 0.0 } else { TOL_EIG };
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let trace_ok = match matrix.trace_real() {
            Real::Exact(t) => t.is_one(),
            Real::Approx(t) => (t - 1.0).abs() <= TOL_EIG,
        };
        if !trace_ok {
            return Err(Error::BadTrace { trace: matrix.trace_real().to_string() });
        }
        let min = min_eigenvalue(&matrix);
        if min < -TOL_EIG {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermitian_deviation() <= TOL_EIG);
        Self { matrix }
    }

    /// The pure basis state `|σ⟩⟨σ|`.
    pub fn basis(sigma: &BitString) -> Self {
        Self { matrix: ComplexMatrix::basis_projector(sigma) }
    }

    /// `2^{-n} I`, the restriction of the tracial state.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let scale = BigRational::new(1.into(), num::BigInt::from(1u8) << n_qubits);
        Self { matrix: ComplexMatrix::identity(n_qubits, Backend::Exact).scale(&scale) }
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn from_ket(v: &Ket) -> Result<Self> {
        Ok(Self { matrix: v.density()? })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.n_qubits()
    }

    pub fn backend(&self) -> Backend {
        self.matrix.backend()
    }

    pub fn to_float(&self) -> Self {
        Self { matrix: self.matrix.to_float() }
    }

    /// `self ⊗ other`; mixed backends are promoted to float.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let (a, b) = common_backend(&self.matrix, &other.matrix);
        Ok(Self { matrix: a.tensor(&b)? })
    }

    pub fn partial_trace(&self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.partial_trace()? })
    }

    pub fn reduce_to(&self, n_qubits: usize) -> Result<Self> {
        Ok(Self { matrix: self.matrix.reduce_to(n_qubits)? })
    }

    /// `Tr(ρ X)` for an operator `X` on the same number of qubits.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<Real> {
        self.matrix.trace_product_real(x)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(&self.matrix)
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> Real {
        self.matrix.trace_product_real(&self.matrix).expect("same size")
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    if m.is_diagonal() {
        if m.is_exact() {
            let negative = m
                .diagonal_real()
                .into_iter()
                .filter_map(|d| d.as_exact().cloned())
                .find(|d| d.is_negative());
            return negative.map_or(0.0, |d| super::scalar::rational_to_f64(&d));
        }
        return m.diagonal_real().iter().map(Real::to_f64).fold(f64::INFINITY, f64::min).min(0.0);
    }
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// `Tr(s p)`, the weight the state puts on the range of `p`.
pub fn projection_weight(s: &DensityMatrix, p: &SpecialProjection) -> Result<Real> {
    s.evaluate(p.matrix())
}

/// `p s p / Tr(s p)`. Exact inputs give an exact result.
pub fn state_project(s: &DensityMatrix, p: &SpecialProjection) -> Result<DensityMatrix> {
    let alpha = projection_weight(s, p)?;
    if alpha.to_f64() <= TOL_EIG {
        return Err(Error::ProjectionAnnihilatesState { weight: alpha.to_f64() });
    }
    let (sm, pm) = common_backend(s.matrix(), p.matrix());
    let psp = pm.mul(&sm)?.mul(&pm)?;
    let matrix = match alpha {
        Real::Exact(a) if !a.is_zero() => psp.scale(&a.recip()),
        other => psp.scale_f64(1.0 / other.to_f64()),
    };
    Ok(DensityMatrix::trusted(matrix))
}
