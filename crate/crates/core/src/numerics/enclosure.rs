use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{dyadic, format_decimal, scaled_bounds, le_q, lt_q, max_q, min_q, to_f64, Rational, Rounding};
use crate::error::{domain, Result};

/// A closed interval `[lo, hi]` with exact rational endpoints, used as a
/// guaranteed container for a real number.
///
/// All arithmetic is outward: the result of `E₁ ∘ E₂` contains `x ∘ y` for
/// every `x ∈ E₁`, `y ∈ E₂`. Since endpoints are exact rationals no rounding
/// happens unless [`Enclosure::round_outward`] is called explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lt_q(&hi, &lo) {
            return Err(domain(format!("empty enclosure [{lo}, {hi}]")));
        }
        Ok(Enclosure { lo, hi })
    }

    /// Builds an enclosure from two endpoints given in either order.
    pub fn spanning(a: Rational, b: Rational) -> Self {
        if le_q(&a, &b) {
            Enclosure { lo: a, hi: b }
        } else {
            Enclosure { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn one() -> Self {
        Self::point(Rational::one())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        le_q(&self.lo, x) && le_q(x, &self.hi)
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        le_q(&self.lo, &other.lo) && le_q(&other.hi, &self.hi)
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        le_q(&self.lo, &other.hi) && le_q(&other.lo, &self.hi)
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: min_q(self.lo.clone(), other.lo.clone()),
            hi: max_q(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = max_q(self.lo.clone(), other.lo.clone());
        let hi = min_q(self.hi.clone(), other.hi.clone());
        le_q(&lo, &hi).then_some(Enclosure { lo, hi })
    }

    /// Every enclosed value is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Every enclosed value is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// The sign shared by every enclosed value, if it is decided.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Every value here is strictly smaller than every value in `other`.
    pub fn certainly_lt(&self, other: &Enclosure) -> bool {
        lt_q(&self.hi, &other.lo)
    }

    pub fn certainly_le(&self, other: &Enclosure) -> bool {
        le_q(&self.hi, &other.lo)
    }

    pub fn add_rational(&self, r: &Rational) -> Enclosure {
        Enclosure {
            lo: &self.lo + r,
            hi: &self.hi + r,
        }
    }

    pub fn scale(&self, r: &Rational) -> Enclosure {
        Enclosure::spanning(&self.lo * r, &self.hi * r)
    }

    pub fn abs(&self) -> Enclosure {
        if self.lo.is_negative() && self.hi.is_positive() {
            Enclosure {
                lo: Rational::zero(),
                hi: max_q(self.hi.clone(), -self.lo.clone()),
            }
        } else {
            Enclosure::spanning(self.lo.abs(), self.hi.abs())
        }
    }

    /// Upper bound on `|x|` over the enclosure.
    pub fn magnitude(&self) -> Rational {
        max_q(self.lo.abs(), self.hi.abs())
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(domain(format!("reciprocal of enclosure {self} containing zero")));
        }
        Ok(Enclosure::spanning(self.hi.recip(), self.lo.recip()))
    }

    pub fn checked_div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self * &other.recip()?)
    }

    /// Integer power; even powers of sign-changing enclosures start at 0.
    pub fn powi(&self, k: u32) -> Enclosure {
        if k == 0 {
            return Enclosure::one();
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 0 && self.lo.is_negative() && self.hi.is_positive() {
            Enclosure {
                lo: Rational::zero(),
                hi: max_q(a, b),
            }
        } else {
            Enclosure::spanning(a, b)
        }
    }

    /// Snaps the endpoints outward onto the grid `2^-bits · Z` when their
    /// denominators have grown beyond `bits` bits. Exact small fractions are
    /// left untouched, so rounding never destroys an exact point needlessly.
    pub fn round_outward(self, bits: u32) -> Enclosure {
        let limit = bits as u64;
        if self.lo.denom().bits() <= limit && self.hi.denom().bits() <= limit {
            return self;
        }
        let snap = |x: &Rational, up: bool| -> Rational {
            if x.denom().bits() <= limit {
                return x.clone();
            }
            let (lo, hi) = scaled_bounds(x, bits as usize);
            dyadic(if up { hi } else { lo }, bits as usize)
        };
        Enclosure {
            lo: snap(&self.lo, false),
            hi: snap(&self.hi, true),
        }
    }

    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Decimal endpoints rounded outward to `digits` fractional digits.
    pub fn to_decimal_pair(&self, digits: usize) -> (String, String) {
        (
            format_decimal(&self.lo, digits, Rounding::Down),
            format_decimal(&self.hi, digits, Rounding::Up),
        )
    }
}

impl From<Rational> for Enclosure {
    fn from(x: Rational) -> Self {
        Enclosure::point(x)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let (lo, hi) = self.to_decimal_pair(digits);
        write!(f, "[{lo}, {hi}]")
    }
}

impl<'a> Add<&'a Enclosure> for &'a Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl<'a> Sub<&'a Enclosure> for &'a Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl<'a> Mul<&'a Enclosure> for &'a Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        if self.lo.is_negative() || rhs.lo.is_negative() {
            let products = [
                &self.lo * &rhs.lo,
                &self.lo * &rhs.hi,
                &self.hi * &rhs.lo,
                &self.hi * &rhs.hi,
            ];
            let [a, b, c, d] = products;
            let lo = min_q(min_q(a.clone(), b.clone()), min_q(c.clone(), d.clone()));
            let hi = max_q(max_q(a, b), max_q(c, d));
            Enclosure { lo, hi }
        } else {
            Enclosure {
                lo: &self.lo * &rhs.lo,
                hi: &self.hi * &rhs.hi,
            }
        }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, rhs: Enclosure) -> Enclosure {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, rhs: &Enclosure) -> Enclosure {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{pow2, rat};

    fn e(a: (i64, i64), b: (i64, i64)) -> Enclosure {
        Enclosure::new(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    #[test]
    fn rejects_inverted_endpoints() {
        assert!(Enclosure::new(rat(1, 1), rat(0, 1)).is_err());
    }

    #[test]
    fn multiplication_handles_signs() {
        let a = e((-1, 1), (2, 1));
        let b = e((-3, 1), (1, 2));
        let p = &a * &b;
        assert_eq!(p.lo(), &rat(-6, 1));
        assert_eq!(p.hi(), &rat(3, 1));
    }

    #[test]
    fn reciprocal_of_straddling_enclosure_fails() {
        assert!(e((-1, 1), (1, 1)).recip().is_err());
        assert_eq!(e((2, 1), (4, 1)).recip().unwrap(), e((1, 4), (1, 2)));
    }

    #[test]
    fn even_power_of_straddling_enclosure() {
        let p = e((-2, 1), (1, 1)).powi(2);
        assert_eq!(p, e((0, 1), (4, 1)));
    }

    #[test]
    fn outward_rounding_keeps_containment() {
        let x = rat(1, 3);
        let r = Enclosure::point(x.clone()).round_outward(1);
        // 1/3 has a 2-bit denominator, so a 1-bit grid must move it
        assert!(r.contains(&x));
        assert!(r.width() <= pow2(-1));
        let kept = Enclosure::point(rat(1, 3)).round_outward(8);
        assert!(kept.is_point());
    }

    #[test]
    fn sign_decisions() {
        assert_eq!(e((1, 10), (1, 1)).sign(), Some(Ordering::Greater));
        assert_eq!(e((-1, 1), (-1, 10)).sign(), Some(Ordering::Less));
        assert_eq!(Enclosure::zero().sign(), Some(Ordering::Equal));
        assert_eq!(e((-1, 1), (1, 1)).sign(), None);
    }
}
