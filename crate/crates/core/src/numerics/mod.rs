//! Exact rational arithmetic and certified enclosures.
//!
//! Everything that feeds a certificate is computed here with exact rational
//! endpoints. Transcendental quantities (square roots, `π`, logarithms,
//! real powers) are returned as [`Enclosure`]s whose width is controlled by
//! an explicit cap; quantities that stay inside `Q(√2, √3, …)` can also be
//! carried exactly as a [`Surd`].

mod bernoulli;
mod enclosure;
mod float;
mod functions;
mod scalar;
mod surd;

pub use bernoulli::{eval_bernoulli, BernoulliPoly};
pub use enclosure::Enclosure;
pub use float::KahanSum;
pub use functions::{
    exp_enclosure, ln2_enclosure, ln_enclosure, nth_root_enclosure, pi_enclosure, pow_enclosure,
    sqrt_enclosure,
};
pub use scalar::{Precision, Scalar};
pub use surd::Surd;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << k as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// Default certificate-grade width cap, `2^-128`.
pub fn default_width_cap() -> Rational {
    pow2(-128)
}

/// Smallest `b ≥ 0` with `2^-b ≤ cap`.
pub fn bits_for_width(cap: &Rational) -> u32 {
    assert!(cap.is_positive(), "width cap must be positive");
    // 2^-b <= p/q  <=>  q <= p * 2^b
    let p = cap.numer();
    let q = cap.denom();
    let mut b = (q.bits() as i64 - p.bits() as i64).max(0) as u32;
    while (p << b as usize) < *q {
        b += 1;
    }
    b
}

/// Lossy conversion for display and float-mode consumers.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Parses a strict fraction literal: an integer or `p/q` with integers.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("`{s}` is not a fraction p/q")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Parses a fraction `p/q` or a decimal literal such as `1.5069` or `2.5e-3`,
/// interpreting the decimal exactly (no binary rounding).
pub fn parse_number(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains('/') || !(t.contains('.') || t.contains('e') || t.contains('E')) {
        return parse_fraction(t);
    }
    let bad = || Error::Parse(format!("`{s}` is not a number"));
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Rounding direction for [`format_decimal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

/// Fixed-point decimal rendering with `frac_digits` digits after the point.
/// `Down`/`Up` round toward −∞/+∞, so a rendered enclosure stays valid.
pub fn format_decimal(r: &Rational, frac_digits: usize, rounding: Rounding) -> String {
    let scale = num_traits::pow(BigInt::from(10), frac_digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let n = match rounding {
        Rounding::Down => scaled.floor().to_integer(),
        Rounding::Up => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let neg = n.sign() == Sign::Minus;
    let (q, rem) = n.abs().div_rem(&scale);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&q.to_string());
    if frac_digits > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", rem.to_string(), width = frac_digits));
    }
    out
}

/// `floor(r·2^g)` and `ceil(r·2^g)`.
pub(crate) fn scaled_bounds(r: &Rational, g: usize) -> (BigInt, BigInt) {
    let (q, rem) = (r.numer() << g).div_mod_floor(r.denom());
    if rem.is_zero() {
        (q.clone(), q)
    } else {
        let up = &q + 1u32;
        (q, up)
    }
}

/// `n·2^-g` in lowest terms without a general gcd.
pub(crate) fn dyadic(n: BigInt, g: usize) -> Rational {
    let shift = n.trailing_zeros().map_or(g, |t| (t as usize).min(g));
    Rational::new_raw(n >> shift, BigInt::one() << (g - shift))
}

/// Ordering of two rationals by cross-multiplication. `Ratio`'s own `Ord`
/// expands continued fractions, which is far slower on large operands.
pub fn cmp_q(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn le_q(a: &Rational, b: &Rational) -> bool {
    cmp_q(a, b) != std::cmp::Ordering::Greater
}

pub fn lt_q(a: &Rational, b: &Rational) -> bool {
    cmp_q(a, b) == std::cmp::Ordering::Less
}

pub fn min_q(a: Rational, b: Rational) -> Rational {
    if le_q(&a, &b) {
        a
    } else {
        b
    }
}

pub fn max_q(a: Rational, b: Rational) -> Rational {
    if le_q(&a, &b) {
        b
    } else {
        a
    }
}

/// Integer square root test: `Some(r)` when `r ≥ 0` is an exact rational
/// square `r = s²`, returning `s`.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let a = r.numer().sqrt();
    let b = r.denom().sqrt();
    (&a * &a == *r.numer() && &b * &b == *r.denom()).then(|| Rational::new(a, b))
}

/// `x^k` for an integer exponent; `x` must be nonzero when `k < 0`.
pub fn powi(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_fraction("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_fraction(" -6/4 ").unwrap(), rat(-3, 2));
        assert_eq!(parse_fraction("2").unwrap(), int(2));
        assert!(parse_fraction("1.5").is_err());
        assert!(parse_fraction("1/0").is_err());
        assert_eq!(parse_number("1.5069").unwrap(), rat(15069, 10000));
        assert_eq!(parse_number("2.5e-3").unwrap(), rat(1, 400));
        assert_eq!(parse_number("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_number("1e3").unwrap(), int(1000));
        assert!(parse_number("1.2.3").is_err());
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_outward() {
        let third = rat(1, 3);
        assert_eq!(format_decimal(&third, 4, Rounding::Down), "0.3333");
        assert_eq!(format_decimal(&third, 4, Rounding::Up), "0.3334");
        assert_eq!(format_decimal(&-third, 4, Rounding::Down), "-0.3334");
        assert_eq!(format_decimal(&rat(7, 2), 0, Rounding::Nearest), "4");
        assert_eq!(format_decimal(&rat(1, 1000), 2, Rounding::Up), "0.01");
    }

    #[test]
    fn width_bits() {
        assert_eq!(bits_for_width(&pow2(-128)), 128);
        assert_eq!(bits_for_width(&rat(1, 1000)), 10);
        assert_eq!(bits_for_width(&int(5)), 0);
        assert_eq!(bits_for_width(&rat(1, 1024)), 10);
    }

    #[test]
    fn f64_conversion_of_huge_rationals() {
        let big = pow2(2000) / pow2(1990);
        assert_eq!(to_f64(&big), 1024.0);
        assert_eq!(to_f64(&from_f64(0.1).unwrap()), 0.1);
    }
}
