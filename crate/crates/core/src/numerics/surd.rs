use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{pow2, powi, sqrt_enclosure, Enclosure, Rational};
use crate::error::{Error, Result};

/// An exact real number `Σ c_d √d` with rational coefficients and distinct
/// squarefree radicands `d` (`d = 1` carries the rational part).
///
/// Square roots of distinct squarefree integers are linearly independent
/// over the rationals, so equality is structural and every nonzero value
/// has a sign that a fine enough enclosure decides.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Surd {
    terms: BTreeMap<u64, Rational>,
}

/// `n = s²·d` with `d` squarefree.
fn split_square(mut n: u64) -> (u64, u64) {
    let (mut s, mut d) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        let mut count = 0;
        while n % p == 0 {
            n /= p;
            count += 1;
        }
        s *= p.pow(count / 2);
        if count % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    (s, d * n)
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Surd::zero();
        s.add_term(1, r);
        s
    }

    /// `√n` in reduced form.
    pub fn sqrt_int(n: u64) -> Self {
        let (s, d) = split_square(n);
        let mut out = Surd::zero();
        if n > 0 {
            out.add_term(d, Rational::from_integer(s.into()));
        }
        out
    }

    /// `n^e` for a positive integer `n` and an exponent with denominator 1
    /// or 2; other exponents leave the field and are a mode error.
    pub fn int_power(n: u64, e: &Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("power of zero in radical arithmetic".into()));
        }
        let base = Rational::from_integer(n.into());
        let den = e.denom().to_u32();
        let floor = e.floor().to_integer().to_i64();
        match (den, floor) {
            (Some(1), Some(k)) => Ok(Surd::from_rational(powi(&base, k))),
            (Some(2), Some(k)) => Ok(Surd::sqrt_int(n).scale(&powi(&base, k))),
            _ => Err(Error::Mode(format!(
                "{n}^({e}) is not a quadratic surd"
            ))),
        }
    }

    fn add_term(&mut self, d: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(d).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&d| d == 1)
    }

    pub fn rational_part(&self) -> Rational {
        self.coefficient(1)
    }

    /// Coefficient of `√d` (zero when absent).
    pub fn coefficient(&self, d: u64) -> Rational {
        self.terms.get(&d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn plus(&self, other: &Surd) -> Surd {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(*d, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Surd) -> Surd {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(*d, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Surd {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, r: &Rational) -> Surd {
        if r.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: self.terms.iter().map(|(d, c)| (*d, c * r)).collect(),
        }
    }

    pub fn times(&self, other: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                // √a·√b = g·√((a/g)(b/g)) for squarefree a, b with g = gcd
                let g = a.gcd(&b);
                let d = (a / g)
                    .checked_mul(b / g)
                    .expect("radicand exceeds u64");
                out.add_term(d, ca * cb * Rational::from_integer(g.into()));
            }
        }
        out
    }

    /// Enclosure of the value with width at most `width_cap`.
    pub fn to_enclosure(&self, width_cap: &Rational) -> Enclosure {
        let radicals = self.terms.keys().filter(|&&d| d != 1).count().max(1);
        let mut acc = Enclosure::point(self.rational_part());
        for (&d, c) in self.terms.iter().filter(|(d, _)| **d != 1) {
            let share = width_cap / (Rational::from_integer(radicals.into()) * c.abs());
            let root = sqrt_enclosure(&Rational::from_integer(d.into()), &share)
                .expect("radicands are positive");
            acc = &acc + &root.scale(c);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.to_enclosure(&pow2(-64)).mid_f64()
    }

    /// Sign of the value; decided by refining enclosures, which terminates
    /// because a nonzero surd is bounded away from zero.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = 64;
        loop {
            if let Some(s) = self.to_enclosure(&pow2(-bits)).sign() {
                return s;
            }
            bits *= 2;
        }
    }

    pub fn cmp_value(&self, other: &Surd) -> Ordering {
        self.minus(other).signum()
    }
}

impl fmt::Display for Surd {
    /// Radicals in ascending radicand order, then the rational part:
    /// `√2/8 + √3/27 + 1127/1024`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let ordered = self
            .terms
            .iter()
            .filter(|(d, _)| **d != 1)
            .chain(self.terms.iter().filter(|(d, _)| **d == 1));
        for (i, (&d, c)) in ordered.enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "−")?,
                (0, false) => {}
                (_, true) => write!(f, " − ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = c.abs();
            let (p, q) = (c.numer(), c.denom());
            if d == 1 {
                write!(f, "{p}")?;
            } else if p.is_one() {
                write!(f, "√{d}")?;
            } else {
                write!(f, "{p}√{d}")?;
            }
            if !q.is_one() {
                write!(f, "/{q}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn reduces_radicands() {
        assert_eq!(split_square(72), (6, 2));
        assert_eq!(split_square(1), (1, 1));
        assert_eq!(split_square(97), (1, 97));
        assert_eq!(Surd::sqrt_int(12).to_string(), "2√3");
        assert!(Surd::sqrt_int(16).is_rational());
    }

    #[test]
    fn half_integer_powers() {
        // 2^{-5/2} = √2/8
        let s = Surd::int_power(2, &rat(-5, 2)).unwrap();
        assert_eq!(s.to_string(), "√2/8");
        // 4^{-3/2} = 1/8
        assert_eq!(Surd::int_power(4, &rat(-3, 2)).unwrap(), Surd::from_rational(rat(1, 8)));
        assert!(Surd::int_power(3, &rat(1, 3)).is_err());
    }

    #[test]
    fn products_and_signs() {
        let r2 = Surd::sqrt_int(2);
        let r6 = Surd::sqrt_int(6);
        // √2·√6 = 2√3
        assert_eq!(r2.times(&r6), Surd::sqrt_int(12));
        // 140/99 < √2 < 99/70
        let x = r2.minus(&Surd::from_rational(rat(140, 99)));
        assert_eq!(x.signum(), Ordering::Greater);
        let y = r2.minus(&Surd::from_rational(rat(99, 70)));
        assert_eq!(y.signum(), Ordering::Less);
        assert_eq!(r2.minus(&r2).signum(), Ordering::Equal);
    }

    #[test]
    fn display_matches_hand_written_form() {
        let s = Surd::sqrt_int(2)
            .scale(&rat(1, 8))
            .plus(&Surd::sqrt_int(3).scale(&rat(1, 27)))
            .plus(&Surd::from_rational(rat(1127, 1024)));
        assert_eq!(s.to_string(), "√2/8 + √3/27 + 1127/1024");
        let t = Surd::from_rational(rat(773, 640)).minus(&Surd::sqrt_int(2).scale(&rat(1, 8)));
        assert_eq!(t.to_string(), "−√2/8 + 773/640");
    }
}
