use nalgebra::DMatrix;
use num::BigRational;

use super::real::Real;
use super::scalar::{pow2_neg, Complex64, GaussianRational, Scalar};
use super::sparse::Mat;
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Which scalar field a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Data {
    Exact(Mat<GaussianRational>),
    Float(Mat<Complex64>),
}

/// A `2^n × 2^n` complex matrix acting on `n` qubits.
///
/// Row and column indices encode bit strings in reverse binary: the string
/// `a_0 … a_{n-1}` sits at index `Σ a_j 2^j`, so qubit 0 is the least
/// significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n_qubits: usize,
    pub(crate) data: Data,
}

macro_rules! map_data {
    ($data:expr, |$m:ident| $body:expr) => {
        match $data {
            Data::Exact($m) => Data::Exact($body),
            Data::Float($m) => Data::Float($body),
        }
    };
}

macro_rules! zip_data {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Data::Exact($x), Data::Exact($y)) => Ok(Data::Exact($body)),
            (Data::Float($x), Data::Float($y)) => Ok(Data::Float($body)),
            _ => Err(Error::BackendMismatch),
        }
    };
}

fn dim_of(n_qubits: usize) -> usize {
    1usize << n_qubits
}

impl ComplexMatrix {
    pub(crate) fn from_data(n_qubits: usize, data: Data) -> Self {
        Self { n_qubits, data }
    }

    pub fn zeros(n_qubits: usize, backend: Backend) -> Self {
        let dim = dim_of(n_qubits);
        let data = match backend {
            Backend::Exact => Data::Exact(Mat::zeros(dim)),
            Backend::Float => Data::Float(Mat::zeros(dim)),
        };
        Self { n_qubits, data }
    }

    pub fn identity(n_qubits: usize, backend: Backend) -> Self {
        let dim = dim_of(n_qubits);
        let data = match backend {
            Backend::Exact => Data::Exact(Mat::identity(dim)),
            Backend::Float => Data::Float(Mat::identity(dim)),
        };
        Self { n_qubits, data }
    }

    /// Row-major dense exact entries.
    pub fn from_exact(n_qubits: usize, entries: Vec<GaussianRational>) -> Result<Self> {
        let dim = dim_of(n_qubits);
        check_len(n_qubits, entries.len(), dim * dim)?;
        Ok(Self { n_qubits, data: Data::Exact(Mat::from_dense(dim, entries)) })
    }

    /// Row-major dense float entries.
    pub fn from_float(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = dim_of(n_qubits);
        check_len(n_qubits, entries.len(), dim * dim)?;
        Ok(Self { n_qubits, data: Data::Float(Mat::from_dense(dim, entries)) })
    }

    pub fn from_exact_diagonal(n_qubits: usize, diag: Vec<GaussianRational>) -> Result<Self> {
        check_len(n_qubits, diag.len(), dim_of(n_qubits))?;
        Ok(Self { n_qubits, data: Data::Exact(Mat::from_diagonal(diag)) })
    }

    pub fn from_float_diagonal(n_qubits: usize, diag: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, diag.len(), dim_of(n_qubits))?;
        Ok(Self { n_qubits, data: Data::Float(Mat::from_diagonal(diag)) })
    }

    /// Exact matrix from `(row, col, value)` triplets; repeated positions add.
    pub fn from_exact_triplets(
        n_qubits: usize,
        entries: Vec<(usize, usize, GaussianRational)>,
    ) -> Result<Self> {
        let dim = dim_of(n_qubits);
        if let Some((i, j, _)) = entries.iter().find(|(i, j, _)| *i >= dim || *j >= dim) {
            return Err(Error::InvalidParameter(format!(
                "entry ({i},{j}) out of range for {n_qubits} qubits"
            )));
        }
        Ok(Self { n_qubits, data: Data::Exact(Mat::from_triplets(dim, entries)) })
    }

    /// `|σ⟩⟨σ|` for a bit string `σ`.
    pub fn basis_projector(sigma: &BitString) -> Self {
        let n = sigma.len();
        let idx = sigma.index();
        let mut mat = Mat::zeros(dim_of(n));
        mat.rows[idx].push((idx, GaussianRational::one()));
        Self { n_qubits: n, data: Data::Exact(mat) }
    }

    pub fn from_nalgebra(n_qubits: usize, m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = dim_of(n_qubits);
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::BadShape { n_qubits, len: m.len(), expected: dim * dim });
        }
        let dense = (0..dim * dim).map(|idx| m[(idx / dim, idx % dim)]).collect();
        Ok(Self { n_qubits, data: Data::Float(Mat::from_dense(dim, dense)) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        dim_of(self.n_qubits)
    }

    pub fn backend(&self) -> Backend {
        match self.data {
            Data::Exact(_) => Backend::Exact,
            Data::Float(_) => Backend::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.backend() == Backend::Exact
    }

    /// Entry as a float complex number (exact entries are converted).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.data {
            Data::Exact(m) => m.get(i, j).to_c64(),
            Data::Float(m) => m.get(i, j),
        }
    }

    /// Entry of an exact matrix; `None` on the float backend.
    pub fn exact_entry(&self, i: usize, j: usize) -> Option<GaussianRational> {
        match &self.data {
            Data::Exact(m) => Some(m.get(i, j)),
            Data::Float(_) => None,
        }
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.data {
            Data::Exact(m) => m.nnz(),
            Data::Float(m) => m.nnz(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.data {
            Data::Exact(m) => m.is_diagonal(),
            Data::Float(m) => m.is_diagonal(),
        }
    }

    /// Real parts of the diagonal entries.
    pub fn diagonal_real(&self) -> Vec<Real> {
        match &self.data {
            Data::Exact(m) => m.diagonal().into_iter().map(|z| Real::Exact(z.re)).collect(),
            Data::Float(m) => m.diagonal().into_iter().map(|z| Real::Approx(z.re)).collect(),
        }
    }

    /// Drops exactness. Conversion the other way is deliberately absent.
    pub fn to_float(&self) -> ComplexMatrix {
        let data = match &self.data {
            Data::Exact(m) => Data::Float(m.map(Scalar::to_c64)),
            Data::Float(m) => Data::Float(m.clone()),
        };
        Self { n_qubits: self.n_qubits, data }
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let dense = match &self.data {
            Data::Exact(m) => m.to_dense_c64(),
            Data::Float(m) => m.to_dense_c64(),
        };
        DMatrix::from_row_slice(dim, dim, &dense)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the first qubits.
    pub fn tensor(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let data = zip_data!(&self.data, &other.data, |a, b| a.tensor(b))?;
        Ok(Self { n_qubits: self.n_qubits + other.n_qubits, data })
    }

    /// `A ↦ A ⊗ I_2`, block-diagonal `(A, A)`.
    pub fn embed(&self) -> ComplexMatrix {
        let data = map_data!(&self.data, |m| m.tensor(&Mat::identity(2)));
        Self { n_qubits: self.n_qubits + 1, data }
    }

    /// Repeated [`embed`](Self::embed) up to `n_qubits` qubits.
    pub fn embed_to(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        if n_qubits < self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: n_qubits });
        }
        let extra = n_qubits - self.n_qubits;
        if extra == 0 {
            return Ok(self.clone());
        }
        let data = map_data!(&self.data, |m| m.tensor(&Mat::identity(dim_of(extra))));
        Ok(Self { n_qubits, data })
    }

    /// Traces out the last qubit: `b_{σ,τ} = a_{σ0,τ0} + a_{σ1,τ1}`.
    pub fn partial_trace(&self) -> Result<ComplexMatrix> {
        if self.n_qubits == 0 {
            return Err(Error::NoQubitToTrace);
        }
        let data = map_data!(&self.data, |m| m.trace_out_last());
        Ok(Self { n_qubits: self.n_qubits - 1, data })
    }

    /// Partial trace down to the first `n_qubits` qubits.
    pub fn reduce_to(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        if n_qubits > self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: n_qubits });
        }
        let mut out = self.clone();
        while out.n_qubits > n_qubits {
            out = out.partial_trace()?;
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self { n_qubits: self.n_qubits, data: map_data!(&self.data, |m| m.adjoint()) }
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_size(other)?;
        let data = zip_data!(&self.data, &other.data, |a, b| a.mul(b))?;
        Ok(Self { n_qubits: self.n_qubits, data })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_size(other)?;
        let data = zip_data!(&self.data, &other.data, |a, b| a.add(b))?;
        Ok(Self { n_qubits: self.n_qubits, data })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_size(other)?;
        let data = zip_data!(&self.data, &other.data, |a, b| a.sub(b))?;
        Ok(Self { n_qubits: self.n_qubits, data })
    }

    /// Multiplies every entry by a rational.
    pub fn scale(&self, c: &BigRational) -> ComplexMatrix {
        let data = match &self.data {
            Data::Exact(m) => Data::Exact(m.scale(&GaussianRational::real(c.clone()))),
            Data::Float(m) => Data::Float(m.scale(&Complex64::from_rational(c))),
        };
        Self { n_qubits: self.n_qubits, data }
    }

    pub fn scale_f64(&self, c: f64) -> ComplexMatrix {
        let data = match &self.data {
            Data::Exact(m) => m.map(Scalar::to_c64).scale(&Complex64::new(c, 0.0)),
            Data::Float(m) => m.scale(&Complex64::new(c, 0.0)),
        };
        Self { n_qubits: self.n_qubits, data: Data::Float(data) }
    }

    /// Real part of the trace.
    pub fn trace_real(&self) -> Real {
        match &self.data {
            Data::Exact(m) => Real::Exact(m.trace().re),
            Data::Float(m) => Real::Approx(m.trace().re),
        }
    }

    /// Complex trace as a float.
    pub fn trace_c64(&self) -> Complex64 {
        match &self.data {
            Data::Exact(m) => m.trace().to_c64(),
            Data::Float(m) => m.trace(),
        }
    }

    /// `τ_n(A) = 2^{-n} Tr(A)`, real part.
    pub fn tracial_value(&self) -> Real {
        match self.trace_real() {
            Real::Exact(t) => Real::Exact(t * pow2_neg(self.n_qubits as u32)),
            Real::Approx(t) => Real::Approx(t / self.dim() as f64),
        }
    }

    /// Real part of `Tr(self · other)`. Mixed backends are evaluated in
    /// floating point.
    pub fn trace_product_real(&self, other: &ComplexMatrix) -> Result<Real> {
        self.check_same_size(other)?;
        Ok(match (&self.data, &other.data) {
            (Data::Exact(a), Data::Exact(b)) => Real::Exact(a.trace_product(b).re),
            (Data::Float(a), Data::Float(b)) => Real::Approx(a.trace_product(b).re),
            (Data::Exact(a), Data::Float(b)) => {
                Real::Approx(a.map(Scalar::to_c64).trace_product(b).re)
            }
            (Data::Float(a), Data::Exact(b)) => {
                Real::Approx(a.trace_product(&b.map(Scalar::to_c64)).re)
            }
        })
    }

    /// Largest entrywise modulus of `self - other`, across backends.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(match (&self.data, &other.data) {
            (Data::Exact(a), Data::Exact(b)) => a.max_abs_diff(b),
            (Data::Float(a), Data::Float(b)) => a.max_abs_diff(b),
            (Data::Exact(a), Data::Float(b)) => a.map(Scalar::to_c64).max_abs_diff(b),
            (Data::Float(a), Data::Exact(b)) => a.max_abs_diff(&b.map(Scalar::to_c64)),
        })
    }

    /// Whether `self` and `other` agree exactly (exact backend) or within
    /// `tol` entrywise (otherwise).
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        match (&self.data, &other.data) {
            (Data::Exact(a), Data::Exact(b)) => a == b,
            _ => self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false),
        }
    }

    /// Deviation from Hermiticity, `max |a_ij − conj(a_ji)|`; exactly 0 for
    /// exact Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub(crate) fn exact_mat(&self) -> Option<&Mat<GaussianRational>> {
        match &self.data {
            Data::Exact(m) => Some(m),
            Data::Float(_) => None,
        }
    }

    pub(crate) fn float_mat(&self) -> Mat<Complex64> {
        match &self.data {
            Data::Exact(m) => m.map(Scalar::to_c64),
            Data::Float(m) => m.clone(),
        }
    }

    /// Top-left `2^k × 2^k` block, i.e. the compression onto strings whose
    /// last `n − k` bits are zero.
    pub fn leading_block(&self, k: usize) -> Result<ComplexMatrix> {
        if k > self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: k });
        }
        let d = dim_of(k);
        Ok(Self { n_qubits: k, data: map_data!(&self.data, |m| m.leading_block(d)) })
    }

    pub fn trace_is_zero(&self) -> bool {
        match &self.data {
            Data::Exact(m) => m.trace().is_zero(),
            Data::Float(m) => m.trace().norm() == 0.0,
        }
    }

    fn check_same_size(&self, other: &ComplexMatrix) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }
}

/// Promotes a pair to a common backend: exact stays exact only if both are.
pub fn common_backend(a: &ComplexMatrix, b: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    if a.backend() == b.backend() {
        (a.clone(), b.clone())
    } else {
        (a.to_float(), b.to_float())
    }
}

fn check_len(n_qubits: usize, len: usize, expected: usize) -> Result<()> {
    if len != expected {
        return Err(Error::BadShape { n_qubits, len, expected });
    }
    Ok(())
}
