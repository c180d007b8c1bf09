//! Clopen subsets of Cantor space described by finite sets of strings, and
//! classical effectively open sets built from them.

use std::collections::BTreeSet;

use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::scalar::pow2_neg;

/// `|strings| · 2^{-k}`, the uniform measure of `⟦strings⟧`.
pub fn clopen_measure(k: usize, strings: &BTreeSet<BitString>) -> Result<BigRational> {
    if let Some(bad) = strings.iter().find(|s| s.len() != k) {
        return Err(Error::InvalidParameter(format!(
            "string {bad} has length {}, expected {k}",
            bad.len()
        )));
    }
    Ok(BigRational::from_integer(BigInt::from(strings.len())) * pow2_neg(k as u32))
}

/// One clopen set: all sequences extending some string of length `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalStage {
    pub k: usize,
    pub strings: BTreeSet<BitString>,
}

impl ClassicalStage {
    pub fn new(k: usize, strings: impl IntoIterator<Item = BitString>) -> Result<Self> {
        let stage = Self { k, strings: strings.into_iter().collect() };
        clopen_measure(k, &stage.strings)?;
        Ok(stage)
    }

    pub fn measure(&self) -> BigRational {
        clopen_measure(self.k, &self.strings).expect("lengths checked at construction")
    }

    /// Whether the clopen set contains every sequence extending `sigma`.
    pub fn contains_cylinder(&self, sigma: &BitString) -> bool {
        sigma.len() >= self.k && self.strings.contains(&sigma.prefix(self.k))
    }

    /// The same clopen set written with strings of length `m ≥ k`.
    pub fn refine_to(&self, m: usize) -> BTreeSet<BitString> {
        assert!(m >= self.k);
        let extra = m - self.k;
        self.strings
            .iter()
            .flat_map(|s| BitString::all(extra).map(move |t| s.concat(&t)))
            .collect()
    }
}

/// A classical effectively open set given as an increasing union of clopen
/// stages.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalLevel {
    pub stages: Vec<ClassicalStage>,
}

impl ClassicalLevel {
    pub fn new(stages: Vec<ClassicalStage>) -> Self {
        Self { stages }
    }

    pub fn single(k: usize, strings: impl IntoIterator<Item = BitString>) -> Result<Self> {
        Ok(Self { stages: vec![ClassicalStage::new(k, strings)?] })
    }

    pub fn max_k(&self) -> usize {
        self.stages.iter().map(|s| s.k).max().unwrap_or(0)
    }

    /// Strings of length `n` whose cylinder lies inside a stage with `k ≤ n`.
    pub fn strings_at(&self, n: usize) -> BTreeSet<BitString> {
        let mut out = BTreeSet::new();
        for stage in self.stages.iter().filter(|s| s.k <= n) {
            out.extend(stage.refine_to(n));
        }
        out
    }

    /// Exact uniform measure of the union of all stages.
    pub fn measure(&self) -> BigRational {
        if self.stages.is_empty() {
            return BigRational::zero();
        }
        let m = self.max_k();
        clopen_measure(m, &self.strings_at(m)).expect("refined strings have length m")
    }

    /// Whether the sequence with prefix `z` (of length at least `max_k`) lies
    /// in the set.
    pub fn covers(&self, z: &BitString) -> bool {
        self.stages.iter().any(|s| s.contains_cylinder(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rational;

    fn set(items: &[&str]) -> BTreeSet<BitString> {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn clopen_measure_examples() {
        assert_eq!(clopen_measure(2, &set(&["00", "01"])).unwrap(), rational(1, 2));
        assert_eq!(clopen_measure(3, &BTreeSet::new()).unwrap(), rational(0, 1));
        let all: BTreeSet<_> = BitString::all(3).collect();
        assert_eq!(clopen_measure(3, &all).unwrap(), rational(1, 1));
        assert!(clopen_measure(2, &set(&["0"])).is_err());
    }

    #[test]
    fn union_measure_counts_overlap_once() {
        let level = ClassicalLevel::new(vec![
            ClassicalStage::new(1, set(&["0"])).unwrap(),
            ClassicalStage::new(2, set(&["00", "10"])).unwrap(),
        ]);
        // ⟦0⟧ ∪ ⟦00⟧ ∪ ⟦10⟧ = ⟦0⟧ ∪ ⟦10⟧
        assert_eq!(level.measure(), rational(3, 4));
        assert!(level.covers(&"011".parse().unwrap()));
        assert!(level.covers(&"10".parse().unwrap()));
        assert!(!level.covers(&"11".parse().unwrap()));
    }
}
