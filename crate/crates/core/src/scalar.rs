//! Arithmetic backends for group computations.
//!
//! Two-step BCH needs only addition, multiplication and halving, so every
//! operation in [`crate::algebra`] is generic over [`Scalar`]. `f64` is used
//! for optimisation, [`Exact`] (arbitrary precision rationals) for lattice
//! work and property tests.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Exact = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Converts an `f64` without rounding. Panics on non-finite input.
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_exact(v: &Exact) -> Self;
    fn half(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs_val(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_exact(v: &Exact) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn half(&self) -> Self {
        0.5 * self
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from_i64(v).expect("i64 fits"))
    }
    fn from_exact(v: &Exact) -> Self {
        v.clone()
    }
    fn half(&self) -> Self {
        self / BigRational::from_integer(BigInt::from(2))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

/// Rational `num/den` as an [`Exact`] value.
pub fn ratio(num: i64, den: i64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_conversion_is_exact() {
        let x = <Exact as Scalar>::from_f64(0.1);
        assert_ne!(x, ratio(1, 10));
        assert_eq!(Scalar::to_f64(&x), 0.1);
        assert_eq!(<Exact as Scalar>::from_f64(0.5), ratio(1, 2));
    }

    #[test]
    fn half_matches_division() {
        assert_eq!(ratio(3, 7).half(), ratio(3, 14));
        assert_eq!(3.0f64.half(), 1.5);
    }
}
