use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, Zero};
use serde::{Serialize, Serializer};

use super::scalar::rational_to_f64;

/// A real number that stays exact when it came from exact inputs.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(BigRational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => rational_to_f64(q),
            Real::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    /// Compares exactly when both sides are exact; otherwise in floating point.
    pub fn compare(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }

    /// `self ≤ bound`, exact where possible, with slack `tol` for float values.
    pub fn at_most(&self, bound: &Real, tol: f64) -> bool {
        match (self, bound) {
            (Real::Exact(a), Real::Exact(b)) => a <= b,
            _ => self.to_f64() <= bound.to_f64() + tol,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::Approx(self.to_f64() + other.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Exact values serialize as `"p/q"` strings, floats as JSON numbers.
impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Real::Exact(q) => serializer.serialize_str(&q.to_string()),
            Real::Approx(x) => serializer.serialize_f64(*x),
        }
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::Exact(q)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Approx(x)
    }
}
