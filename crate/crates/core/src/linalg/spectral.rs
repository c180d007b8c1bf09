//! Floating-point spectral operations on Hermitian matrices: eigenvalues,
//! matrix functions, trace distance and fidelity.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::matrix::ComplexMatrix;
use super::scalar::Complex64;
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let dim = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = Complex64::new(f(lambda), 0.0);
            for i in 0..dim {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix. Diagonal inputs skip the solver.
pub fn hermitian_eigen(m: &ComplexMatrix) -> HermitianEigen {
    let dim = m.dim();
    let mut pairs: Vec<(f64, usize)>;
    if m.is_diagonal() {
        pairs = (0..dim).map(|i| (m.entry(i, i).re, i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &(_, i)) in pairs.iter().enumerate() {
            vectors[(i, col)] = Complex64::new(1.0, 0.0);
        }
        return HermitianEigen { values: pairs.into_iter().map(|p| p.0).collect(), vectors };
    }
    let dense = hermitize(m.to_nalgebra());
    let eig = SymmetricEigen::new(dense);
    pairs = eig.eigenvalues.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = DMatrix::zeros(dim, dim);
    for (col, &(_, src)) in pairs.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values: pairs.into_iter().map(|p| p.0).collect(), vectors }
}

pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_diagonal() {
        let mut v: Vec<f64> = (0..m.dim()).map(|i| m.entry(i, i).re).collect();
        v.sort_by(f64::total_cmp);
        return v;
    }
    let mut v: Vec<f64> =
        SymmetricEigen::new(hermitize(m.to_nalgebra())).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// Square root of a positive matrix. Eigenvalues within rounding noise of
/// zero (`8 · dim · machine ε · ‖m‖`) are treated as zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> DMatrix<Complex64> {
    let eig = hermitian_eigen(m);
    let scale = eig.values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = 8.0 * m.dim() as f64 * f64::EPSILON * scale;
    eig.apply(|x| if x <= floor { 0.0 } else { x.sqrt() })
}

/// How the trace norm in [`trace_distance`] is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceDistanceMode {
    /// `½ Σ |λ_i(A − B)|`, the usual trace distance.
    #[default]
    Standard,
    /// `½ √Tr((A−B)(A−B)†)`, half the Hilbert–Schmidt norm.
    Hs,
}

/// `D(A, B) = ½ ‖A − B‖`, with the norm chosen by `mode`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix, mode: TraceDistanceMode) -> Result<f64> {
    let (a, b) = (a.matrix(), b.matrix());
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch { left: a.n_qubits(), right: b.n_qubits() });
    }
    let diff = if a.backend() == b.backend() { a.sub(b)? } else { a.to_float().sub(&b.to_float())? };
    if diff.is_zero() {
        return Ok(0.0);
    }
    Ok(match mode {
        TraceDistanceMode::Standard => 0.5 * eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>(),
        TraceDistanceMode::Hs => {
            let hs = diff.mul(&diff.adjoint())?.trace_real().to_f64();
            0.5 * hs.max(0.0).sqrt()
        }
    })
}

/// Uhlmann fidelity `Tr √(√A B √A)`, computed as the sum of the singular
/// values of `√A √B` and clamped to `[0, 1]`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let (am, bm) = (a.matrix(), b.matrix());
    if am.n_qubits() != bm.n_qubits() {
        return Err(Error::DimensionMismatch { left: am.n_qubits(), right: bm.n_qubits() });
    }
    let product = sqrt_psd(am) * sqrt_psd(bm);
    let f: f64 = product.singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::Backend;
    use crate::linalg::scalar::rational;

    fn basis(s: &str) -> DensityMatrix {
        DensityMatrix::basis(&s.parse().unwrap())
    }

    fn mixed1() -> DensityMatrix {
        DensityMatrix::maximally_mixed(1)
    }

    #[test]
    fn trace_distance_examples() {
        let std = TraceDistanceMode::Standard;
        assert_eq!(trace_distance(&mixed1(), &mixed1(), std).unwrap(), 0.0);
        assert!((trace_distance(&basis("0"), &basis("1"), std).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&basis("0"), &mixed1(), std).unwrap() - 0.5).abs() < 1e-12);
        // the Hilbert–Schmidt reading is never larger
        let hs = trace_distance(&basis("0"), &basis("1"), TraceDistanceMode::Hs).unwrap();
        assert!((hs - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity(&mixed1(), &mixed1()).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&basis("0"), &basis("1")).unwrap().abs() < 1e-9);
        let f = fidelity(&basis("0"), &mixed1()).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn diagonal_eigen_fast_path_sorts() {
        let m = ComplexMatrix::from_exact_diagonal(
            1,
            vec![
                crate::linalg::scalar::GaussianRational::real(rational(3, 4)),
                crate::linalg::scalar::GaussianRational::real(rational(1, 4)),
            ],
        )
        .unwrap();
        assert_eq!(eigenvalues(&m), vec![0.25, 0.75]);
        let e = hermitian_eigen(&m);
        let back = ComplexMatrix::from_nalgebra(1, &e.apply(|x| x)).unwrap();
        assert!(back.max_abs_diff(&m.to_float()).unwrap() < 1e-15);
        let _ = Backend::Float;
    }
}
