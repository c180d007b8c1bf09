//! From quantum tests back to classical ones: the strings a projection
//! "sees" with weight at least `δ`, and classical Martin-Löf tests assembled
//! from them with exact measure bookkeeping.

use std::collections::BTreeSet;

use num::{BigRational, One, Zero};
use serde::Serialize;

use crate::bits::BitString;
use crate::cantor::{clopen_measure, ClassicalLevel, ClassicalStage};
use crate::error::{Error, Result};
use crate::linalg::scalar::{pow2_neg, rational_to_f64};
use crate::linalg::{Real, SpecialProjection, TOL_EIG};
use crate::randomness::{QmlTest, Sigma1Levels};
use crate::states::ClassicalSequence;

/// `S^k_{p,δ} = {η ∈ 2^k : δ ≤ Tr(|η⟩⟨η| p)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StringSelection {
    pub k: usize,
    pub strings: BTreeSet<BitString>,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub delta: BigRational,
    /// Strings whose float weight lies within [`TOL_EIG`] of `δ`; always
    /// empty for exact projections.
    pub near_ties: Vec<BitString>,
}

impl StringSelection {
    pub fn measure(&self) -> BigRational {
        clopen_measure(self.k, &self.strings).expect("selected strings have length k")
    }

    pub fn to_stage(&self) -> ClassicalStage {
        ClassicalStage { k: self.k, strings: self.strings.clone() }
    }
}

fn check_delta(delta: &BigRational) -> Result<()> {
    if *delta <= BigRational::zero() || *delta >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("δ = {delta} must lie in (0,1)")));
    }
    Ok(())
}

/// Enumerates all `2^k` basis strings. Exact projections are compared
/// exactly and inclusively; float projections admit strings down to
/// `δ − TOL_EIG` and flag every string within that tolerance of `δ`.
pub fn select_strings(p: &SpecialProjection, delta: &BigRational) -> Result<StringSelection> {
    check_delta(delta)?;
    let k = p.n_qubits();
    let delta_f = rational_to_f64(delta);
    let mut strings = BTreeSet::new();
    let mut near_ties = Vec::new();
    for (i, weight) in p.matrix().diagonal_real().into_iter().enumerate() {
        let keep = match &weight {
            Real::Exact(w) => w >= delta,
            Real::Approx(w) => {
                if (w - delta_f).abs() <= TOL_EIG {
                    near_ties.push(BitString::from_index(i, k));
                }
                *w >= delta_f - TOL_EIG
            }
        };
        if keep {
            strings.insert(BitString::from_index(i, k));
        }
    }
    Ok(StringSelection { k, strings, delta: delta.clone(), near_ties })
}

/// Checks that selecting from `p ⊗ I_2` yields exactly the one-bit
/// extensions `ηa` of the strings selected from `p`.
pub fn check_lifting(p: &SpecialProjection, delta: &BigRational) -> Result<bool> {
    let base = select_strings(p, delta)?;
    let lifted = select_strings(&p.embed(), delta)?;
    let expected: BTreeSet<BitString> = base
        .strings
        .iter()
        .flat_map(|eta| [eta.extended(false), eta.extended(true)])
        .collect();
    Ok(lifted.strings == expected)
}

/// One level of a classical Martin-Löf test with its measure and bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalTestLevel {
    pub r: usize,
    pub stages: Vec<ClassicalStage>,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub measure: BigRational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub bound: BigRational,
}

impl ClassicalTestLevel {
    pub fn as_level(&self) -> ClassicalLevel {
        ClassicalLevel::new(self.stages.clone())
    }
}

/// A classical Martin-Löf test as increasing unions of clopen stages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalMlTest {
    pub levels: Vec<ClassicalTestLevel>,
}

impl ClassicalMlTest {
    /// Whether every level contains the sequence with prefix `z`.
    pub fn covers_all(&self, z: &BitString) -> bool {
        self.levels.iter().all(|l| l.as_level().covers(z))
    }
}

/// Level `r` is `⋃_{k ≤ depth} ⟦S^k_{p^r_k, δ}⟧`. The uniform measure of each
/// level is verified exactly against `2^{-r}/δ`.
pub fn derive_classical_test(
    test: &QmlTest,
    delta: &BigRational,
    depth: usize,
) -> Result<ClassicalMlTest> {
    check_delta(delta)?;
    if depth > test.max_depth() {
        return Err(Error::DepthExceeded { requested: depth, max: test.max_depth() });
    }
    let mut levels = Vec::with_capacity(test.levels.len());
    for (r, g) in test.levels.iter().enumerate() {
        let stages = (0..=depth)
            .map(|k| Ok(select_strings(g.projection(k)?, delta)?.to_stage()))
            .collect::<Result<Vec<_>>>()?;
        let measure = ClassicalLevel::new(stages.clone()).measure();
        let bound = pow2_neg(r as u32) / delta;
        if measure > bound {
            return Err(Error::MeasureBoundViolated {
                level: r,
                measure: measure.to_string(),
                bound: bound.to_string(),
            });
        }
        levels.push(ClassicalTestLevel { r, stages, measure, bound });
    }
    Ok(ClassicalMlTest { levels })
}

/// Per-level outcome of extracting a classical test and checking it on `Z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageLevel {
    pub r: usize,
    /// `ρ_Z(p^r_depth)`.
    pub value: Real,
    /// Whether `Z` must be covered, i.e. some `k ≤ depth` has
    /// `ρ_Z(p^r_k) ≥ δ`.
    pub obligation: bool,
    pub covered: bool,
}

/// Coverage of `Z` by each level of the derived classical test.
pub fn coverage(
    test: &QmlTest,
    derived: &ClassicalMlTest,
    z: &ClassicalSequence,
    delta: &BigRational,
    depth: usize,
) -> Result<Vec<CoverageLevel>> {
    let prefix = z.prefix(depth)?;
    let mut out = Vec::with_capacity(derived.levels.len());
    for (g, level) in test.levels.iter().zip(&derived.levels) {
        let mut obligation = false;
        let mut value = Real::zero();
        for k in 0..=depth {
            let p = g.projection(k)?;
            let idx = prefix.prefix(k).index();
            value = match p.matrix().exact_entry(idx, idx) {
                Some(w) => Real::Exact(w.re),
                None => Real::Approx(p.matrix().entry(idx, idx).re),
            };
            let meets = match &value {
                Real::Exact(v) => v >= delta,
                Real::Approx(v) => *v >= rational_to_f64(delta) - TOL_EIG,
            };
            obligation |= meets;
        }
        out.push(CoverageLevel {
            r: level.r,
            value,
            obligation,
            covered: level.as_level().covers(&prefix),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rational;
    use crate::linalg::{GaussianRational, Ket};
    use crate::randomness::classical_to_quantum;

    fn set(items: &[&str]) -> BTreeSet<BitString> {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn plus() -> SpecialProjection {
        let v = Ket::from_exact(1, vec![GaussianRational::from_ints(1, 0); 2]).unwrap();
        SpecialProjection::from_ket(&v).unwrap()
    }

    #[test]
    fn select_examples() {
        let half = rational(1, 2);
        let p0 = SpecialProjection::basis(&"0".parse().unwrap());
        assert_eq!(select_strings(&p0, &half).unwrap().strings, set(&["0"]));
        let s = select_strings(&plus(), &half).unwrap();
        assert_eq!(s.strings, set(&["0", "1"]));
        assert!(s.measure() <= rational(1, 2) / &half);
        assert!(select_strings(&SpecialProjection::zero(3), &half).unwrap().strings.is_empty());
        assert!(select_strings(&p0, &rational(1, 1)).is_err());
    }

    #[test]
    fn lifting_examples() {
        let half = rational(1, 2);
        let p0 = SpecialProjection::basis(&"0".parse().unwrap());
        assert!(check_lifting(&p0, &half).unwrap());
        assert_eq!(select_strings(&p0.embed(), &half).unwrap().strings, set(&["00", "01"]));
        assert!(check_lifting(&SpecialProjection::zero(2), &half).unwrap());
        assert!(check_lifting(&plus(), &rational(1, 3)).unwrap());
    }

    #[test]
    fn float_ties_are_flagged() {
        let s = select_strings(&plus().to_float(), &rational(1, 2)).unwrap();
        assert_eq!(s.strings, set(&["0", "1"]));
        assert_eq!(s.near_ties.len(), 2);
    }

    #[test]
    fn round_trip_of_prefix_test() {
        let levels = (0..5)
            .map(|r| ClassicalLevel::single(r, [BitString::zeros(r)]).unwrap())
            .collect();
        let t = classical_to_quantum(levels, 6).unwrap();
        let half = rational(1, 2);
        let derived = derive_classical_test(&t, &half, 6).unwrap();
        let z = ClassicalSequence::constant(false, 6);
        for level in &derived.levels {
            assert_eq!(level.measure, pow2_neg(level.r as u32));
            assert!(level.measure <= level.bound);
            assert!(level.as_level().covers(&BitString::zeros(6)));
        }
        let cov = coverage(&t, &derived, &z, &half, 6).unwrap();
        assert!(cov.iter().all(|c| c.obligation && c.covered));
    }

    #[test]
    fn zero_test_gives_empty_levels() {
        let t = classical_to_quantum(vec![ClassicalLevel::default(); 3], 4).unwrap();
        let derived = derive_classical_test(&t, &rational(1, 2), 4).unwrap();
        assert!(derived.levels.iter().all(|l| l.measure.is_zero()));
    }
}
