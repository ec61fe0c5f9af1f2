//! Real algebraic numbers of the form `sum_e r_e * sqrt(e)` with rational
//! coefficients and squarefree integer radicands.
//!
//! This is the smallest ring closed under the square roots the complex
//! structure extraction needs: `sqrt(d1)*sqrt(d2) = g*sqrt((d1/g)(d2/g))`
//! with `g = gcd(d1, d2)` keeps every radicand squarefree without any
//! factoring at multiplication time. Distinct squarefree radicals are
//! linearly independent over the rationals, so equality is coefficient-wise.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::scalar::{ExtScalar, Rat, Ring, Scalar, ScalarError};

const TRIAL_DIVISION_BOUND: u128 = 1_000_000;

/// `n = s^2 * e` with `e` squarefree. Errors when the unfactored remainder
/// is too large to classify.
fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, u64), ScalarError> {
    assert!(n.is_positive());
    let mut rem: u128 = n
        .to_u128()
        .ok_or_else(|| ScalarError::SquarefreeOverflow(n.to_string()))?;
    let mut square = BigInt::from(1u8);
    let mut free: u128 = 1;
    let mut d: u128 = 2;
    while d <= TRIAL_DIVISION_BOUND && d * d <= rem {
        if rem % d == 0 {
            let mut exp = 0u32;
            while rem % d == 0 {
                rem /= d;
                exp += 1;
            }
            for _ in 0..exp / 2 {
                square *= BigInt::from(d);
            }
            if exp % 2 == 1 {
                free = free.checked_mul(d).ok_or_else(|| {
                    ScalarError::SquarefreeOverflow(n.to_string())
                })?;
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if rem > 1 {
        let root = rem.isqrt();
        if root * root == rem {
            // The remainder is a perfect square; its root joins the square
            // part whether or not it is prime.
            square *= BigInt::from(root);
        } else if rem <= TRIAL_DIVISION_BOUND.pow(3) {
            // All prime factors of `rem` exceed the trial bound, so at most
            // two of them fit below the cube; not a square means squarefree.
            free = free
                .checked_mul(rem)
                .ok_or_else(|| ScalarError::SquarefreeOverflow(n.to_string()))?;
        } else {
            return Err(ScalarError::SquarefreeOverflow(n.to_string()));
        }
    }
    let free_u64 = u64::try_from(free)
        .map_err(|_| ScalarError::SquarefreeOverflow(n.to_string()))?;
    Ok((square, free_u64))
}

/// Element of the multi-quadratic extension of the rationals.
///
/// Invariant: keys are squarefree positive integers (1 is the rational
/// part) and no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Algebraic {
    terms: BTreeMap<u64, Rat>,
}

impl Algebraic {
    pub fn rational(r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !Ring::is_zero(&r) {
            terms.insert(1, r);
        }
        Self { terms }
    }

    /// `coeff * sqrt(radicand)` with `radicand` already squarefree.
    fn radical(coeff: Rat, radicand: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !Ring::is_zero(&coeff) {
            terms.insert(radicand, coeff);
        }
        Self { terms }
    }

    /// Terms as `(squarefree radicand, coefficient)` pairs, radicand 1 first.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.terms.iter().map(|(d, r)| (*d, r))
    }

    pub fn rational_part(&self) -> Rat {
        self.terms.get(&1).cloned().unwrap_or_else(<Rat as Ring>::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|d| *d == 1)
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, r)| Scalar::to_f64(r) * (*d as f64).sqrt())
            .sum()
    }

    fn insert_term(terms: &mut BTreeMap<u64, Rat>, d: u64, coeff: Rat) {
        if Ring::is_zero(&coeff) {
            return;
        }
        match terms.entry(d) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if Ring::is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }
}

impl fmt::Debug for Algebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Algebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (d, r)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if *d == 1 {
                write!(f, "{r}")?;
            } else {
                write!(f, "{r}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

impl Ring for Algebraic {
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::rational(<Rat as Ring>::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (d, r) in &rhs.terms {
            Self::insert_term(&mut terms, *d, r.clone());
        }
        Self { terms }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (d1, r1) in &self.terms {
            for (d2, r2) in &rhs.terms {
                let g = d1.gcd(d2);
                let d = (d1 / g) * (d2 / g);
                let coeff = r1.mul(r2).mul(&Rat::from_int(g as i64));
                Self::insert_term(&mut terms, d, coeff);
            }
        }
        Self { terms }
    }
    fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(d, r)| (*d, Ring::neg(r))).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl ExtScalar<Rat> for Algebraic {
    fn from_base(b: &Rat) -> Self {
        Self::rational(b.clone())
    }

    fn sqrt_base(b: &Rat) -> Result<Self, ScalarError> {
        if Ring::is_zero(b) {
            return Ok(Ring::zero());
        }
        if b.is_negative() {
            return Err(ScalarError::NegativeSqrt);
        }
        // sqrt(p/q) = sqrt(p*q)/q.
        let p = b.numer().clone();
        let q = b.denom().clone();
        let (square, free) = squarefree_decompose(&(&p * &q))?;
        Ok(Self::radical(Rat::new(square, q), free))
    }

    fn is_negligible(&self, _tol: &Rat) -> bool {
        Ring::is_zero(self)
    }

    fn try_to_base(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(<Rat as Ring>::zero());
        }
        if self.is_rational() {
            return Some(self.rational_part());
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_of(n: i64, d: i64) -> Algebraic {
        Algebraic::sqrt_base(&Rat::from_ratio(n, d)).unwrap()
    }

    #[test]
    fn squarefree_decomposition() {
        assert_eq!(squarefree_decompose(&BigInt::from(12)).unwrap(), (BigInt::from(2), 3));
        assert_eq!(squarefree_decompose(&BigInt::from(49)).unwrap(), (BigInt::from(7), 1));
        assert_eq!(squarefree_decompose(&BigInt::from(30)).unwrap(), (BigInt::from(1), 30));
    }

    #[test]
    fn radical_products_stay_squarefree() {
        let a = sqrt_of(6, 1);
        let b = sqrt_of(10, 1);
        // sqrt(6)*sqrt(10) = 2*sqrt(15)
        let prod = a.mul(&b);
        let expected = Algebraic::radical(Rat::from_int(2), 15);
        assert_eq!(prod, expected);
    }

    #[test]
    fn square_of_sqrt_is_rational() {
        let a = sqrt_of(3, 4);
        assert_eq!(a.mul(&a).try_to_base().unwrap(), Rat::from_ratio(3, 4));
    }

    #[test]
    fn perfect_square_roots_collapse_to_rationals() {
        let a = sqrt_of(9, 16);
        assert!(a.is_rational());
        assert_eq!(a.rational_part(), Rat::from_ratio(3, 4));
    }

    #[test]
    fn mixed_terms_compare_componentwise() {
        let x = sqrt_of(2, 1).add(&Algebraic::from_base(&Rat::from_int(1)));
        let y = Algebraic::from_base(&Rat::from_int(1)).add(&sqrt_of(2, 1));
        assert_eq!(x, y);
        assert!(!Ring::is_zero(&x.sub(&y).add(&sqrt_of(3, 1))));
    }
}
