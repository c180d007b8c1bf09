//! Scalar fields for the two matrix backends.
//!
//! The exact backend works over Gaussian rationals `a + b·i` with `a, b ∈ ℚ`;
//! the float backend over `Complex64`. Exact values may be converted to floats,
//! never the other way around.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Complex64 = num::complex::Complex<f64>;

/// Field operations shared by both backends, taken by reference so that the
/// exact backend does not clone big integers on every step.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// Division; `None` when `rhs` is zero.
    fn over(&self, rhs: &Self) -> Option<Self>;
    fn negate(&self) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn from_rational(re: &BigRational) -> Self;

    fn add_in_place(&mut self, rhs: &Self) {
        *self = self.plus(rhs);
    }
}

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `num / den` as a real Gaussian rational. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `|z|²`, which is always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }

    fn one() -> Self {
        Self::real(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn plus(&self, rhs: &Self) -> Self {
        Self::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    fn minus(&self, rhs: &Self) -> Self {
        Self::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Self::real(&self.re * &rhs.re);
        }
        Self::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }

    fn over(&self, rhs: &Self) -> Option<Self> {
        let den = rhs.norm_sqr();
        if den.is_zero() {
            return None;
        }
        let num = self.times(&rhs.conj());
        Some(Self::new(num.re / &den, num.im / &den))
    }

    fn negate(&self) -> Self {
        Self::new(-&self.re, -&self.im)
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn from_rational(re: &BigRational) -> Self {
        Self::real(re.clone())
    }

    fn add_in_place(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn over(&self, rhs: &Self) -> Option<Self> {
        if Scalar::is_zero(rhs) {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn negate(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        num::complex::Complex::conj(self)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_rational(re: &BigRational) -> Self {
        Complex64::new(rational_to_f64(re), 0.0)
    }

    fn add_in_place(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        self.plus(rhs)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        self.minus(rhs)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        self.times(rhs)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        self.negate()
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"0.25"` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Ok(q) = BigRational::from_str(text) {
        return Ok(q);
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if let Some((int_part, frac_part)) = body.split_once('.') {
        let digits = format!("{int_part}{frac_part}");
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let num = BigInt::from_str(&digits).map_err(|e| Error::Parse(e.to_string()))?;
            let den = num::pow(BigInt::from(10), frac_part.len());
            let q = BigRational::new(num, den);
            return Ok(if neg { -q } else { q });
        }
    }
    Err(Error::Parse(format!("not a rational number: {text:?}")))
}

/// `2^{-n}` as an exact rational.
pub fn pow2_neg(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), num::pow(BigInt::from(2), n as usize))
}

/// `2^{e}` for any integer exponent.
pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(num::pow(BigInt::from(2), e as usize))
    } else {
        pow2_neg((-e) as u32)
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
