use num::{BigRational, Zero};

use super::matrix::{Backend, ComplexMatrix, Data};
use super::real::Real;
use super::scalar::{Complex64, GaussianRational, Scalar};
use super::sparse::Mat;
use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Amplitudes {
    Exact(Vec<GaussianRational>),
    Float(Vec<Complex64>),
}

/// A state vector on `n` qubits, indexed like [`ComplexMatrix`] rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    n_qubits: usize,
    amps: Amplitudes,
}

impl Ket {
    pub fn basis(sigma: &BitString) -> Self {
        let mut amps = vec![GaussianRational::zero(); 1 << sigma.len()];
        amps[sigma.index()] = GaussianRational::one();
        Self { n_qubits: sigma.len(), amps: Amplitudes::Exact(amps) }
    }

    pub fn from_exact(n_qubits: usize, amps: Vec<GaussianRational>) -> Result<Self> {
        check_len(n_qubits, amps.len())?;
        Ok(Self { n_qubits, amps: Amplitudes::Exact(amps) })
    }

    pub fn from_float(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, amps.len())?;
        Ok(Self { n_qubits, amps: Amplitudes::Float(amps) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn backend(&self) -> Backend {
        match self.amps {
            Amplitudes::Exact(_) => Backend::Exact,
            Amplitudes::Float(_) => Backend::Float,
        }
    }

    pub fn amplitudes_c64(&self) -> Vec<Complex64> {
        match &self.amps {
            Amplitudes::Exact(a) => a.iter().map(Scalar::to_c64).collect(),
            Amplitudes::Float(a) => a.clone(),
        }
    }

    pub fn exact_amplitudes(&self) -> Option<&[GaussianRational]> {
        match &self.amps {
            Amplitudes::Exact(a) => Some(a),
            Amplitudes::Float(_) => None,
        }
    }

    /// `⟨v|v⟩`.
    pub fn norm_sqr(&self) -> Real {
        match &self.amps {
            Amplitudes::Exact(a) => {
                Real::Exact(a.iter().map(GaussianRational::norm_sqr).sum::<BigRational>())
            }
            Amplitudes::Float(a) => Real::Approx(a.iter().map(|z| z.norm_sqr()).sum()),
        }
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`; exact amplitudes give an exact density matrix.
    pub fn density(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n_qubits;
        match &self.amps {
            Amplitudes::Exact(a) => {
                let norm = GaussianRational::real(match self.norm_sqr() {
                    Real::Exact(q) => q,
                    Real::Approx(_) => unreachable!(),
                });
                let nz: Vec<(usize, &GaussianRational)> =
                    a.iter().enumerate().filter(|(_, z)| !z.is_zero()).collect();
                if nz.is_empty() {
                    return Err(Error::InvalidParameter("zero vector has no density".into()));
                }
                let mut mat = Mat::zeros(dim);
                for &(i, ai) in &nz {
                    let scaled = ai.over(&norm).expect("nonzero norm");
                    mat.rows[i] = nz.iter().map(|&(j, aj)| (j, scaled.times(&aj.conj()))).collect();
                }
                Ok(ComplexMatrix::from_data(self.n_qubits, Data::Exact(mat)))
            }
            Amplitudes::Float(a) => {
                let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
                if norm == 0.0 {
                    return Err(Error::InvalidParameter("zero vector has no density".into()));
                }
                let dense = (0..dim * dim)
                    .map(|idx| a[idx / dim] * a[idx % dim].conj() / norm)
                    .collect();
                ComplexMatrix::from_float(self.n_qubits, dense)
            }
        }
    }

    /// `self ⊗ other`, with `self` on the first qubits.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let da = 1usize << self.n_qubits;
        let n_qubits = self.n_qubits + other.n_qubits;
        let amps = match (&self.amps, &other.amps) {
            (Amplitudes::Exact(a), Amplitudes::Exact(b)) => Amplitudes::Exact(
                (0..da * b.len()).map(|idx| a[idx % da].times(&b[idx / da])).collect(),
            ),
            (Amplitudes::Float(a), Amplitudes::Float(b)) => {
                Amplitudes::Float((0..da * b.len()).map(|idx| a[idx % da] * b[idx / da]).collect())
            }
            _ => return Err(Error::BackendMismatch),
        };
        Ok(Ket { n_qubits, amps })
    }

    /// `M |v⟩`. Mixed backends are evaluated in floating point.
    pub fn apply(&self, m: &ComplexMatrix) -> Result<Ket> {
        if m.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: m.n_qubits(), right: self.n_qubits });
        }
        let amps = match (m.exact_mat(), &self.amps) {
            (Some(mat), Amplitudes::Exact(v)) => Amplitudes::Exact(
                mat.rows
                    .iter()
                    .map(|row| {
                        let mut acc = GaussianRational::zero();
                        for (j, a) in row {
                            if !v[*j].is_zero() {
                                acc.add_in_place(&a.times(&v[*j]));
                            }
                        }
                        acc
                    })
                    .collect(),
            ),
            _ => {
                let mat = m.float_mat();
                let v = self.amplitudes_c64();
                Amplitudes::Float(
                    mat.rows
                        .iter()
                        .map(|row| row.iter().map(|(j, a)| a * v[*j]).sum())
                        .collect(),
                )
            }
        };
        Ok(Ket { n_qubits: self.n_qubits, amps })
    }

    /// `self ⊗ |0^{n−k}⟩`: the vector padded with zero qubits up to `n`.
    pub fn pad_zeros(&self, n_qubits: usize) -> Result<Ket> {
        if n_qubits < self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: n_qubits });
        }
        let dim = 1usize << n_qubits;
        let amps = match &self.amps {
            Amplitudes::Exact(a) => {
                let mut out = vec![GaussianRational::zero(); dim];
                out[..a.len()].clone_from_slice(a);
                Amplitudes::Exact(out)
            }
            Amplitudes::Float(a) => {
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                out[..a.len()].copy_from_slice(a);
                Amplitudes::Float(out)
            }
        };
        Ok(Ket { n_qubits, amps })
    }

    /// Whether `self` and `other` span the same line, i.e. define the same
    /// pure state. Exact vectors are compared exactly via
    /// `|⟨u|v⟩|² = ⟨u|u⟩⟨v|v⟩`; otherwise the trace distance
    /// `√(1 − |⟨u|v⟩|²/(⟨u|u⟩⟨v|v⟩))` must be at most `tol`.
    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        if let (Amplitudes::Exact(u), Amplitudes::Exact(v)) = (&self.amps, &other.amps) {
            let mut ip = GaussianRational::zero();
            for (a, b) in u.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    ip.add_in_place(&a.conj().times(b));
                }
            }
            let nu: BigRational = u.iter().map(GaussianRational::norm_sqr).sum();
            let nv: BigRational = v.iter().map(GaussianRational::norm_sqr).sum();
            return !nu.is_zero() && ip.norm_sqr() == nu * nv;
        }
        let (u, v) = (self.amplitudes_c64(), other.amplitudes_c64());
        let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if nu == 0.0 || nv == 0.0 {
            return false;
        }
        (1.0 - ip.norm_sqr() / (nu * nv)).max(0.0).sqrt() <= tol
    }

    pub fn to_float(&self) -> Ket {
        Ket { n_qubits: self.n_qubits, amps: Amplitudes::Float(self.amplitudes_c64()) }
    }
}

fn check_len(n_qubits: usize, len: usize) -> Result<()> {
    let expected = 1usize << n_qubits;
    if len != expected {
        return Err(Error::BadShape { n_qubits, len, expected });
    }
    Ok(())
}
