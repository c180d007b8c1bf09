//! Finite bit strings and the reverse-binary index encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite string of bits `a_0 a_1 … a_{n-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![true; n])
    }

    /// Inverse of [`index`](Self::index) for strings of length `len`.
    pub fn from_index(index: usize, len: usize) -> Self {
        Self((0..len).map(|j| (index >> j) & 1 == 1).collect())
    }

    /// `Σ a_j 2^j`: bit `j` has weight `2^j`.
    pub fn index(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extended(&self, bit: bool) -> Self {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Self(bits)
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// All strings of length `n` in index order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << n).map(move |i| BitString::from_index(i, n))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
