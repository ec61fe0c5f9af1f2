//! Scalar fields for the toolkit: exact rationals and tolerance-based floats.
//!
//! Every algebra fixes one scalar mode for all of its data. Exact mode uses
//! arbitrary-precision rationals and exact equality; approximate mode uses
//! `f64` with an algebra-wide relative tolerance for zero tests.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algnum::Algebraic;

/// Exact rational scalar.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("squarefree part of {0} exceeds the supported range")]
    SquarefreeOverflow(String),
}

/// Commutative ring operations shared by base scalars and their extensions.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

/// A scalar field the solvers can eliminate over.
pub trait Scalar: Ring {
    /// Extension ring holding square roots of positive scalars. For floats
    /// this is the field itself; for rationals it is [`Algebraic`].
    type Ext: ExtScalar<Self>;

    /// True when arithmetic and equality are exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Field division. Callers must ensure `rhs` passed a zero test first.
    fn div(&self, rhs: &Self) -> Self;
    fn abs(&self) -> Self;
    /// `|self| > |rhs|`; drives pivot selection and max-entry scans.
    fn abs_gt(&self, rhs: &Self) -> bool;
    /// Zero test against an absolute threshold. Exact scalars ignore the
    /// threshold and test for literal zero.
    fn is_negligible(&self, tol: &Self) -> bool;
    fn cmp_order(&self, rhs: &Self) -> Ordering;
    fn to_f64(&self) -> f64;
    /// Round-trippable text form (`"p/q"` for rationals).
    fn to_text(&self) -> String {
        format!("{self}")
    }
    fn from_text(s: &str) -> Result<Self, ScalarError>;
    fn is_positive(&self) -> bool {
        self.cmp_order(&Self::zero()) == Ordering::Greater
    }
}

/// Ring extension of a base scalar by square roots of its positive elements.
pub trait ExtScalar<B>: Ring {
    fn from_base(b: &B) -> Self;
    /// `sqrt(b)` for `b > 0`.
    fn sqrt_base(b: &B) -> Result<Self, ScalarError>;
    /// Zero test against an absolute threshold expressed in the base field.
    fn is_negligible(&self, tol: &B) -> bool;
    /// Back-conversion when the value lies in the base field.
    fn try_to_base(&self) -> Option<B>;
}

impl Ring for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        <Rat as Zero>::is_zero(self)
    }
}

impl Scalar for Rat {
    type Ext = Algebraic;
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn abs_gt(&self, rhs: &Self) -> bool {
        Signed::abs(self) > Signed::abs(rhs)
    }
    fn is_negligible(&self, _tol: &Self) -> bool {
        Ring::is_zero(self)
    }
    fn cmp_order(&self, rhs: &Self) -> Ordering {
        self.cmp(rhs)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_text(s: &str) -> Result<Self, ScalarError> {
        Rat::from_str(s.trim()).map_err(|_| ScalarError::Parse(s.to_owned()))
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for f64 {
    type Ext = f64;
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn abs_gt(&self, rhs: &Self) -> bool {
        f64::abs(*self) > f64::abs(*rhs)
    }
    fn is_negligible(&self, tol: &Self) -> bool {
        f64::abs(*self) <= *tol
    }
    fn cmp_order(&self, rhs: &Self) -> Ordering {
        self.partial_cmp(rhs).unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_text(s: &str) -> Result<Self, ScalarError> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| ScalarError::Parse(s.to_owned()))?;
            let d: f64 = d.trim().parse().map_err(|_| ScalarError::Parse(s.to_owned()))?;
            return Ok(n / d);
        }
        t.parse().map_err(|_| ScalarError::Parse(s.to_owned()))
    }
}

impl ExtScalar<f64> for f64 {
    fn from_base(b: &f64) -> Self {
        *b
    }
    fn sqrt_base(b: &f64) -> Result<Self, ScalarError> {
        if *b < 0.0 {
            return Err(ScalarError::NegativeSqrt);
        }
        Ok(b.sqrt())
    }
    fn is_negligible(&self, tol: &f64) -> bool {
        f64::abs(*self) <= *tol
    }
    fn try_to_base(&self) -> Option<f64> {
        Some(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let x = Rat::from_ratio(-3, 4);
        assert_eq!(x.to_text(), "-3/4");
        assert_eq!(Rat::from_text("-3/4").unwrap(), x);
        assert_eq!(Rat::from_text("5").unwrap(), Rat::from_int(5));
        assert!(Rat::from_text("not a number").is_err());
    }

    #[test]
    fn exact_negligibility_ignores_tolerance() {
        let tiny = Rat::from_ratio(1, 1_000_000_000_000);
        assert!(!tiny.is_negligible(&Rat::from_ratio(1, 1000)));
        assert!(Scalar::is_negligible(&<Rat as Ring>::zero(), &<Rat as Ring>::zero()));
    }

    #[test]
    fn float_negligibility_uses_tolerance() {
        assert!(Scalar::is_negligible(&1e-12f64, &1e-9));
        assert!(!Scalar::is_negligible(&1e-6f64, &1e-9));
    }
}
