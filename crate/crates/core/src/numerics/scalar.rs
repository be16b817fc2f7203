use std::fmt;

use super::{bits_for_width, pow2, pow_enclosure, Enclosure, Rational, Surd};
use crate::error::Result;

/// Accuracy target for each primitive evaluation (a power, a root, a
/// constant): widths of about `2^-bits`. Sums of many primitives are
/// correspondingly wider.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub fn new(bits: u32) -> Self {
        Precision { bits }
    }

    pub fn from_width_cap(cap: &Rational) -> Self {
        Precision {
            bits: bits_for_width(cap),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width_cap(&self) -> Rational {
        pow2(-(self.bits as i64))
    }

    pub fn finer(&self, extra: u32) -> Self {
        Precision {
            bits: self.bits + extra,
        }
    }
}

impl Default for Precision {
    /// Certificate grade, `2^-128`.
    fn default() -> Self {
        Precision { bits: 128 }
    }
}

/// The arithmetic the Euler–Maclaurin and Schur formulas are written over.
///
/// [`Surd`] evaluates them exactly when every power involved has a
/// half-integer exponent; [`Enclosure`] evaluates them for any rational
/// exponent with controlled width.
pub trait Scalar: Clone + fmt::Debug {
    fn from_rational(r: Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    /// `n^e` for a positive integer `n`.
    fn int_power(n: u64, e: &Rational, prec: &Precision) -> Result<Self>;
    fn enclose(&self, prec: &Precision) -> Enclosure;
    /// Bounds the size of the representation after long accumulations.
    fn settle(self, _prec: &Precision) -> Self {
        self
    }
}

impl Scalar for Enclosure {
    fn from_rational(r: Rational) -> Self {
        Enclosure::point(r)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, r: &Rational) -> Self {
        Enclosure::scale(self, r)
    }

    fn int_power(n: u64, e: &Rational, prec: &Precision) -> Result<Self> {
        pow_enclosure(&Rational::from_integer(n.into()), e, &prec.width_cap())
    }

    fn enclose(&self, _prec: &Precision) -> Enclosure {
        self.clone()
    }

    fn settle(self, prec: &Precision) -> Self {
        self.round_outward(prec.bits() + 8)
    }
}

impl Scalar for Surd {
    fn from_rational(r: Rational) -> Self {
        Surd::from_rational(r)
    }

    fn plus(&self, other: &Self) -> Self {
        Surd::plus(self, other)
    }

    fn minus(&self, other: &Self) -> Self {
        Surd::minus(self, other)
    }

    fn times(&self, other: &Self) -> Self {
        Surd::times(self, other)
    }

    fn scale(&self, r: &Rational) -> Self {
        Surd::scale(self, r)
    }

    fn int_power(n: u64, e: &Rational, _prec: &Precision) -> Result<Self> {
        Surd::int_power(n, e)
    }

    fn enclose(&self, prec: &Precision) -> Enclosure {
        self.to_enclosure(&prec.width_cap())
    }
}
