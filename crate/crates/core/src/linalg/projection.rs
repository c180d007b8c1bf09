use nalgebra::DVector;
use num::Zero;

use super::ket::Ket;
use super::matrix::{common_backend, Backend, ComplexMatrix, Data};
use super::real::Real;
use super::scalar::{Complex64, GaussianRational, Scalar};
use super::sparse::{axpy, inner, Mat, SparseVec};
use super::spectral::hermitian_eigen;
use super::TOL_EIG;
use crate::bits::BitString;
use crate::error::{Error, Result};

/// An orthogonal projection `p = p† = p²` on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialProjection {
    matrix: ComplexMatrix,
    rank: usize,
}

impl SpecialProjection {
    /// Validates `p = p†`, `p² = p` and that the trace is a nonnegative
    /// integer. Exact inputs are checked exactly, float inputs within
    /// [`TOL_EIG`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = if matrix.is_exact() { 0.0 } else { TOL_EIG };
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let square = matrix.mul(&matrix)?;
        let idem = square.max_abs_diff(&matrix)?;
        if idem > tol {
            return Err(Error::NotProjection { reason: format!("‖p² − p‖ = {idem:e}") });
        }
        let rank = match matrix.trace_real() {
            Real::Exact(t) => {
                if !t.is_integer() || t < num::BigRational::zero() {
                    return Err(Error::NotProjection { reason: format!("trace {t} is not a rank") });
                }
                t.to_integer().try_into().map_err(|_| Error::NotProjection {
                    reason: "rank out of range".into(),
                })?
            }
            Real::Approx(t) => {
                let r = t.round();
                if (t - r).abs() > TOL_EIG || r < 0.0 {
                    return Err(Error::NotProjection { reason: format!("trace {t} is not a rank") });
                }
                r as usize
            }
        };
        Ok(Self { matrix, rank })
    }

    pub(crate) fn trusted(matrix: ComplexMatrix, rank: usize) -> Self {
        Self { matrix, rank }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(n_qubits, Backend::Exact), rank: 0 }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n_qubits, Backend::Exact), rank: 1 << n_qubits }
    }

    /// `|σ⟩⟨σ|`.
    pub fn basis(sigma: &BitString) -> Self {
        Self { matrix: ComplexMatrix::basis_projector(sigma), rank: 1 }
    }

    /// Diagonal projection onto the span of the given basis strings, all of
    /// length `n_qubits`.
    pub fn from_strings<'a>(
        n_qubits: usize,
        strings: impl IntoIterator<Item = &'a BitString>,
    ) -> Result<Self> {
        let mut diag = vec![GaussianRational::zero(); 1 << n_qubits];
        let mut rank = 0;
        for s in strings {
            if s.len() != n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "string {s} has length {}, expected {n_qubits}",
                    s.len()
                )));
            }
            if diag[s.index()].is_zero() {
                diag[s.index()] = GaussianRational::one();
                rank += 1;
            }
        }
        Ok(Self { matrix: ComplexMatrix::from_exact_diagonal(n_qubits, diag)?, rank })
    }

    /// Rank-one projection onto the line through `v`.
    pub fn from_ket(v: &Ket) -> Result<Self> {
        Ok(Self { matrix: v.density()?, rank: 1 })
    }

    /// Projection onto the span of the given vectors. Exact vectors give an
    /// exact projection.
    pub fn onto_span(n_qubits: usize, vectors: &[Ket]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch { left: n_qubits, right: v.n_qubits() });
        }
        let dim = 1usize << n_qubits;
        if vectors.iter().all(|v| v.backend() == Backend::Exact) {
            let sparse = vectors.iter().map(|v| {
                v.exact_amplitudes()
                    .expect("exact")
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| !z.is_zero())
                    .map(|(i, z)| (i, z.clone()))
                    .collect()
            });
            let (mat, rank) = exact_span(dim, sparse);
            return Ok(Self { matrix: ComplexMatrix::from_data(n_qubits, Data::Exact(mat)), rank });
        }
        let dense = vectors.iter().map(|v| DVector::from_vec(v.amplitudes_c64())).collect();
        let (mat, rank) = float_span(n_qubits, dense)?;
        Ok(Self { matrix: mat, rank })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.n_qubits()
    }

    pub fn backend(&self) -> Backend {
        self.matrix.backend()
    }

    /// `dim rg(p) = Tr(p)`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `τ(p) = 2^{-n} rank(p)`; exact whenever the backend is.
    pub fn tracial_value(&self) -> Real {
        match self.backend() {
            Backend::Exact => self.matrix.tracial_value(),
            Backend::Float => Real::Exact(
                num::BigRational::from_integer(self.rank.into())
                    * super::scalar::pow2_neg(self.n_qubits() as u32),
            ),
        }
    }

    /// `p ⊗ I_2`, the same projection seen one qubit deeper.
    pub fn embed(&self) -> Self {
        Self { matrix: self.matrix.embed(), rank: self.rank * 2 }
    }

    pub fn embed_to(&self, n_qubits: usize) -> Result<Self> {
        let extra = n_qubits.checked_sub(self.n_qubits()).ok_or(Error::DimensionMismatch {
            left: self.n_qubits(),
            right: n_qubits,
        })?;
        Ok(Self { matrix: self.matrix.embed_to(n_qubits)?, rank: self.rank << extra })
    }

    pub fn to_float(&self) -> Self {
        Self { matrix: self.matrix.to_float(), rank: self.rank }
    }

    /// `‖q·p′ − p′‖_∞` where `p′` is `self` embedded to `other`'s size; zero
    /// exactly when `rg(self) ⊆ rg(other)`.
    pub fn order_deviation(&self, other: &SpecialProjection) -> Result<f64> {
        let lifted = self.embed_to(other.n_qubits())?;
        let (q, p) = common_backend(other.matrix(), lifted.matrix());
        q.mul(&p)?.max_abs_diff(&p)
    }

    /// `self ≤ other` in the range-containment order, up to [`TOL_EIG`].
    pub fn is_below(&self, other: &SpecialProjection) -> Result<bool> {
        Ok(self.order_deviation(other)? <= TOL_EIG)
    }

    /// Orthonormal basis of the range, as columns.
    fn range_vectors_float(&self) -> Vec<DVector<Complex64>> {
        let eig = hermitian_eigen(&self.matrix);
        eig.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(j, _)| eig.vectors.column(j).into_owned())
            .collect()
    }
}

/// `p ∨ q`, the projection onto `rg p + rg q`.
pub fn projection_join(p: &SpecialProjection, q: &SpecialProjection) -> Result<SpecialProjection> {
    let n = p.n_qubits();
    if n != q.n_qubits() {
        return Err(Error::DimensionMismatch { left: n, right: q.n_qubits() });
    }
    if p.rank == 0 {
        return Ok(if p.backend() == q.backend() { q.clone() } else { q.to_float() });
    }
    if q.rank == 0 {
        return Ok(if p.backend() == q.backend() { p.clone() } else { p.to_float() });
    }
    let dim = 1usize << n;
    let (pm, qm) = common_backend(p.matrix(), q.matrix());
    if pm.is_diagonal() && qm.is_diagonal() {
        return Ok(diagonal_join(n, &pm, &qm));
    }
    match (pm.exact_mat(), qm.exact_mat()) {
        (Some(a), Some(b)) => {
            let columns = |m: &Mat<GaussianRational>| -> Vec<SparseVec<GaussianRational>> {
                m.rows
                    .iter()
                    .filter(|row| !row.is_empty())
                    .map(|row| row.iter().map(|(j, z)| (*j, z.conj())).collect())
                    .collect()
            };
            let (mat, rank) = exact_span(dim, columns(a).into_iter().chain(columns(b)));
            Ok(SpecialProjection::trusted(ComplexMatrix::from_data(n, Data::Exact(mat)), rank))
        }
        _ => {
            let mut vectors = p.to_float().range_vectors_float();
            vectors.extend(q.to_float().range_vectors_float());
            let (mat, rank) = float_span(n, vectors)?;
            Ok(SpecialProjection::trusted(mat, rank))
        }
    }
}

fn diagonal_join(n: usize, a: &ComplexMatrix, b: &ComplexMatrix) -> SpecialProjection {
    let dim = 1usize << n;
    let on: Vec<bool> =
        (0..dim).map(|i| a.entry(i, i).re > 0.5 || b.entry(i, i).re > 0.5).collect();
    let rank = on.iter().filter(|&&x| x).count();
    let matrix = if a.is_exact() {
        let diag = on
            .iter()
            .map(|&x| if x { GaussianRational::one() } else { GaussianRational::zero() })
            .collect();
        ComplexMatrix::from_exact_diagonal(n, diag)
    } else {
        let diag = on.iter().map(|&x| Complex64::new(if x { 1.0 } else { 0.0 }, 0.0)).collect();
        ComplexMatrix::from_float_diagonal(n, diag)
    };
    SpecialProjection::trusted(matrix.expect("diagonal has the right length"), rank)
}

/// Exact Gram–Schmidt without normalization: `P = Σ v v† / ⟨v|v⟩` keeps every
/// entry rational.
fn exact_span(
    dim: usize,
    vectors: impl Iterator<Item = SparseVec<GaussianRational>>,
) -> (Mat<GaussianRational>, usize) {
    let mut basis: Vec<(SparseVec<GaussianRational>, GaussianRational)> = Vec::new();
    for v in vectors {
        if basis.len() == dim {
            break;
        }
        let mut r = v;
        for (b, nb) in &basis {
            let c = inner(b, &r);
            if !c.is_zero() {
                r = axpy(&r, &c.over(nb).expect("nonzero norm").negate(), b);
            }
        }
        if r.is_empty() {
            continue;
        }
        let nr = inner(&r, &r);
        basis.push((r, nr));
    }
    let rank = basis.len();
    if rank == dim {
        return (Mat::identity(dim), rank);
    }
    let mut triplets = Vec::new();
    for (b, nb) in &basis {
        for (i, bi) in b {
            let scaled = bi.over(nb).expect("nonzero norm");
            for (j, bj) in b {
                triplets.push((*i, *j, scaled.times(&bj.conj())));
            }
        }
    }
    (Mat::from_triplets(dim, triplets), rank)
}

/// Modified Gram–Schmidt with one reorthogonalization pass; vectors whose
/// residual falls below [`TOL_EIG`] (relative to their norm) are dropped.
fn float_span(n: usize, vectors: Vec<DVector<Complex64>>) -> Result<(ComplexMatrix, usize)> {
    let dim = 1usize << n;
    let mut q: Vec<DVector<Complex64>> = Vec::new();
    for v in vectors {
        if q.len() == dim {
            break;
        }
        let norm0 = v.norm();
        if norm0 <= TOL_EIG {
            continue;
        }
        let mut r = v / Complex64::new(norm0, 0.0);
        for _ in 0..2 {
            for b in &q {
                let c = b.dotc(&r);
                r -= b * c;
            }
        }
        let nr = r.norm();
        if nr <= TOL_EIG {
            continue;
        }
        q.push(r / Complex64::new(nr, 0.0));
    }
    let rank = q.len();
    let mut dense = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for b in &q {
        dense += b * b.adjoint();
    }
    Ok((ComplexMatrix::from_nalgebra(n, &dense)?, rank))
}
