//! Von Neumann entropy, entropy-rate profiles and the cross-entropy
//! statistic `−(1/n) Tr(ρ↾n log₂ ψ↾n)`, all in bits.

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::scalar::rational_to_f64;
use crate::linalg::spectral::{eigenvalues, hermitian_eigen};
use crate::linalg::{DensityMatrix, Real, TOL_EIG};
use crate::states::CoherentState;

/// `−Σ λ log₂ λ` over the eigenvalues, with `0 · log 0 = 0`. Eigenvalues at
/// or below zero (numerical noise) contribute nothing.
pub fn von_neumann_entropy(s: &DensityMatrix) -> f64 {
    let h: f64 = eigenvalues(s.matrix())
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    if h <= 0.0 {
        0.0
    } else {
        h.min(s.n_qubits() as f64)
    }
}

/// One row of an [`EntropyReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyLevel {
    pub n: usize,
    pub entropy: f64,
    pub rate: f64,
    /// `−(1/n) Tr(ρ↾n log₂ ψ↾n)` when a reference state was given and the
    /// statistic is defined at this length.
    pub cross_entropy: Option<f64>,
}

/// Which quantity an [`EntropyReport`] profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    EntropyRate,
    CrossEntropy,
}

/// Finite profile of `H(ψ↾n)` and `H(ψ↾n)/n` for `1 ≤ n ≤ n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub label: String,
    pub kind: StatisticKind,
    pub levels: Vec<EntropyLevel>,
}

/// Profiles `H(ψ↾n)/n` for `n = 1..=n_max`.
pub fn entropy_rate(psi: &CoherentState, n_max: usize) -> Result<EntropyReport> {
    if n_max > psi.max_depth() {
        return Err(Error::DepthExceeded { requested: n_max, max: psi.max_depth() });
    }
    let levels = (1..=n_max)
        .map(|n| {
            let entropy = von_neumann_entropy(psi.level(n)?);
            Ok(EntropyLevel { n, entropy, rate: entropy / n as f64, cross_entropy: None })
        })
        .collect::<Result<_>>()?;
    Ok(EntropyReport { label: psi.label().to_string(), kind: StatisticKind::EntropyRate, levels })
}

/// Entropy profile of `ρ` with the cross-entropy against `ψ` alongside. Lengths
/// where the statistic is undefined are reported as `None`.
pub fn cross_entropy_profile(
    rho: &CoherentState,
    psi: &CoherentState,
    n_max: usize,
) -> Result<EntropyReport> {
    let mut report = entropy_rate(rho, n_max)?;
    if n_max > psi.max_depth() {
        return Err(Error::DepthExceeded { requested: n_max, max: psi.max_depth() });
    }
    for level in &mut report.levels {
        level.cross_entropy = match cross_entropy_statistic(rho, psi, level.n) {
            Ok(v) => Some(v),
            Err(Error::StatisticUndefined(_)) => None,
            Err(e) => return Err(e),
        };
    }
    report.kind = StatisticKind::CrossEntropy;
    report.label = format!("{} vs {}", rho.label(), psi.label());
    Ok(report)
}

fn undefined(n: usize, detail: String) -> Error {
    Error::StatisticUndefined(format!("at length {n}: {detail}"))
}

/// `−(1/n) Tr(ρ↾n log₂ ψ↾n)` through the eigendecomposition of `ψ↾n`.
///
/// Eigenvalues of `ψ↾n` below [`TOL_EIG`] are dropped when `ρ↾n` puts no more
/// than [`TOL_EIG`] weight on them; otherwise the statistic is undefined.
/// When `ψ↾n` is exact and diagonal, equal diagonal values are grouped and
/// `ρ`'s weight on each group is summed exactly before taking logarithms.
pub fn cross_entropy_statistic(rho: &CoherentState, psi: &CoherentState, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("the statistic needs n ≥ 1".into()));
    }
    let r = rho.level(n)?;
    let p = psi.level(n)?;
    let pm = p.matrix();
    if pm.is_exact() && pm.is_diagonal() {
        let rm = r.matrix();
        let mut groups: BTreeMap<BigRational, Real> = BTreeMap::new();
        for (i, psi_ii) in pm.diagonal_real().into_iter().enumerate() {
            let psi_ii = psi_ii.as_exact().cloned().expect("exact diagonal");
            let weight = match rm.exact_entry(i, i) {
                Some(w) => Real::Exact(w.re),
                None => Real::Approx(rm.entry(i, i).re),
            };
            let entry = groups.entry(psi_ii).or_insert_with(Real::zero);
            *entry = entry.add(&weight);
        }
        let mut total = 0.0;
        for (value, weight) in groups {
            if value.is_zero() {
                if weight.to_f64() > TOL_EIG {
                    return Err(undefined(n, format!("ρ has weight {weight} off the support of ψ")));
                }
                continue;
            }
            total += weight.to_f64() * rational_to_f64(&value).log2();
        }
        return Ok(-total / n as f64);
    }
    let eig = hermitian_eigen(&p.to_float().into_matrix());
    let rd = r.to_float().into_matrix().to_nalgebra();
    let mut total = 0.0;
    for (j, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(j);
        let weight = v.dotc(&(&rd * v)).re;
        if lambda < TOL_EIG {
            if weight > TOL_EIG {
                return Err(undefined(
                    n,
                    format!("ψ has eigenvalue {lambda:e} where ρ has weight {weight:e}"),
                ));
            }
            continue;
        }
        total += weight * lambda.log2();
    }
    Ok(-total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rational;
    use crate::states::{biased_qubit, ClassicalSequence, MeasureState};
    use crate::BitString;

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis(&BitString::zeros(3))), 0.0);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(3)) - 3.0).abs() < 1e-12);
        let s = biased_qubit(&rational(1, 4)).unwrap();
        assert!((von_neumann_entropy(&s) - 0.8112781244591328).abs() < 1e-12);
        assert!((von_neumann_entropy(&s.to_float()) - binary_entropy(0.75)).abs() < 1e-12);
    }

    #[test]
    fn rate_examples() {
        let t = entropy_rate(&CoherentState::tracial(5), 5).unwrap();
        assert!(t.levels.iter().all(|l| (l.rate - 1.0).abs() < 1e-12));
        let z = entropy_rate(&CoherentState::from_bits(ClassicalSequence::constant(true, 5)), 5).unwrap();
        assert!(z.levels.iter().all(|l| l.rate == 0.0));
        let iid = CoherentState::iid_state(biased_qubit(&rational(1, 4)).unwrap(), 5).unwrap();
        let r = entropy_rate(&iid, 5).unwrap();
        assert!(r.levels.iter().all(|l| (l.rate - binary_entropy(0.75)).abs() < 1e-9));
        assert!(entropy_rate(&iid, 6).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        let iid = CoherentState::iid_state(biased_qubit(&rational(1, 4)).unwrap(), 5).unwrap();
        for n in 1..=5 {
            let c = cross_entropy_statistic(&iid, &iid, n).unwrap();
            assert!((c - binary_entropy(0.75)).abs() < 1e-9);
        }
        let tracial = CoherentState::tracial(5);
        let epr = CoherentState::epr_chain(5);
        for n in 1..=5 {
            assert_eq!(cross_entropy_statistic(&epr, &tracial, n).unwrap(), 1.0);
            assert_eq!(cross_entropy_statistic(&iid, &tracial, n).unwrap(), 1.0);
        }
        let z = ClassicalSequence::periodic(&"011".parse().unwrap(), 6).unwrap();
        let mu = MeasureState::bernoulli(rational(1, 3)).unwrap();
        let rho = CoherentState::from_bits(z.clone());
        let psi = CoherentState::from_measure(mu.clone(), 6);
        for n in 1..=6 {
            let expected = -rational_to_f64(&mu.prefix_prob(&z.prefix(n).unwrap()).unwrap()).log2() / n as f64;
            assert!((cross_entropy_statistic(&rho, &psi, n).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn support_violation_is_undefined() {
        let ones = CoherentState::from_bits(ClassicalSequence::constant(true, 3));
        let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 3));
        assert!(matches!(
            cross_entropy_statistic(&ones, &zeros, 2),
            Err(Error::StatisticUndefined(_))
        ));
        let float_zeros = CoherentState::from_matrix_sequence(
            (0..=3).map(|n| DensityMatrix::basis(&BitString::zeros(n)).to_float().into_matrix()).collect(),
        )
        .unwrap();
        assert!(matches!(
            cross_entropy_statistic(&ones, &float_zeros, 2),
            Err(Error::StatisticUndefined(_))
        ));
        assert!(cross_entropy_statistic(&zeros, &float_zeros, 2).unwrap().abs() < 1e-12);
        let report = cross_entropy_profile(&ones, &zeros, 3).unwrap();
        assert!(report.levels.iter().all(|l| l.cross_entropy.is_none()));
    }
}
