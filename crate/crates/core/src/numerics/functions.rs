//! Enclosures of √x, q-th roots, π, ln, exp and real powers.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{bits_for_width, dyadic, le_q, pow2, powi, scaled_bounds, Enclosure, Rational};
use crate::error::{domain, Result};

/// Enclosure of `√x` with width at most `width_cap`. Perfect squares give a
/// point enclosure.
pub fn sqrt_enclosure(x: &Rational, width_cap: &Rational) -> Result<Enclosure> {
    nth_root_enclosure(x, 2, width_cap)
}

/// Enclosure of the real `q`-th root of `x ≥ 0`, width at most `width_cap`.
///
/// With `x = a/b` in lowest terms, `x^{1/q} = (a·b^{q−1})^{1/q} / b`, so one
/// integer root of a scaled integer gives both endpoints.
pub fn nth_root_enclosure(x: &Rational, q: u32, width_cap: &Rational) -> Result<Enclosure> {
    if x.is_negative() {
        return Err(domain(format!("root of negative number {x}")));
    }
    if !width_cap.is_positive() {
        return Err(domain("width cap must be positive"));
    }
    if q == 0 {
        return Err(domain("zeroth root"));
    }
    if q == 1 || x.is_zero() {
        return Ok(Enclosure::point(x.clone()));
    }
    let b = x.denom().clone();
    let n = x.numer() * num_traits::pow(b.clone(), (q - 1) as usize);
    let r0 = n.nth_root(q);
    if num_traits::pow(r0.clone(), q as usize) == n {
        return Ok(Enclosure::point(Rational::new(r0, b)));
    }
    let k = bits_for_width(width_cap) as usize;
    let r = (n << (q as usize * k)).nth_root(q);
    let den = b << k;
    Ok(Enclosure::spanning(
        Rational::new(r.clone(), den.clone()),
        Rational::new(r + 1, den),
    ))
}

/// Alternating-series bounds on `atan(1/q)` after `terms` and `terms + 1`
/// terms; the true value lies between them.
fn arctan_recip(q: i64, terms: usize) -> Enclosure {
    let q2 = BigInt::from(q * q);
    let mut power = BigInt::from(q);
    let mut sum = Rational::zero();
    let mut last = Rational::zero();
    for k in 0..=terms {
        let term = Rational::new(BigInt::one(), &power * BigInt::from(2 * k as i64 + 1));
        last = sum.clone();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &q2;
    }
    Enclosure::spanning(last, sum)
}

/// Enclosure of `π` of width at most `width_cap`, from Machin's formula
/// `π = 16·atan(1/5) − 4·atan(1/239)` with alternating-series remainders.
pub fn pi_enclosure(width_cap: &Rational) -> Result<Enclosure> {
    if !width_cap.is_positive() {
        return Err(domain("width cap must be positive"));
    }
    let bits = bits_for_width(width_cap);
    // atan(1/5) loses log2(25) ≈ 4.64 bits per term
    let mut terms = (bits as usize + 8) / 4 + 2;
    loop {
        let a = arctan_recip(5, terms);
        let b = arctan_recip(239, terms / 3 + 2);
        let pi = a.scale(&Rational::from_integer(16.into()))
            - b.scale(&Rational::from_integer(4.into()));
        let pi = pi.round_outward(bits + 3);
        if le_q(&pi.width(), width_cap) {
            return Ok(pi);
        }
        terms += 4;
    }
}

/// Nonnegative interval `[lo, hi]·2^-g` on scaled integers. Series are
/// summed in this form to avoid normalizing rationals at every step.
#[derive(Clone, Debug)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
    g: usize,
}

fn ceil_shr(x: BigInt, s: usize) -> BigInt {
    (x + ((BigInt::one() << s) - 1)) >> s
}

impl Fixed {
    /// `r ≥ 0` rounded outward onto the grid.
    fn from_rational(r: &Rational, g: usize) -> Fixed {
        let (lo, hi) = scaled_bounds(r, g);
        Fixed { lo, hi, g }
    }

    fn one(g: usize) -> Fixed {
        Fixed {
            lo: BigInt::one() << g,
            hi: BigInt::one() << g,
            g,
        }
    }

    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed {
            lo: (&self.lo * &o.lo) >> self.g,
            hi: ceil_shr(&self.hi * &o.hi, self.g),
            g: self.g,
        }
    }

    fn div_small(&self, k: u64) -> Fixed {
        Fixed {
            lo: &self.lo / k,
            hi: (&self.hi + (k - 1)) / k,
            g: self.g,
        }
    }

    fn add(&mut self, o: &Fixed) {
        self.lo += &o.lo;
        self.hi += &o.hi;
    }

    /// `hi·2^-g < 2^-w`.
    fn below(&self, w: usize) -> bool {
        self.hi.bits() as usize + w <= self.g
    }

    fn to_enclosure(&self) -> Enclosure {
        Enclosure::spanning(dyadic(self.lo.clone(), self.g), dyadic(self.hi.clone(), self.g))
    }
}

/// `atanh(z) = Σ z^{2j+1}/(2j+1)` for exact `0 ≤ z ≤ 1/3` on the grid
/// `2^-g`, accurate to about `2^-w`.
fn atanh_fixed(z: &Rational, w: usize, g: usize) -> Fixed {
    let zf = Fixed::from_rational(z, g);
    let z2 = zf.mul(&zf);
    let mut power = zf;
    let mut sum = Fixed::from_rational(&Rational::zero(), g);
    if z.is_zero() {
        return sum;
    }
    let mut j: u64 = 0;
    loop {
        sum.add(&power.div_small(2 * j + 1));
        power = power.mul(&z2);
        j += 1;
        if power.below(w + 4) {
            // the rest is at most power·Σ z^{2i} ≤ power·9/8
            sum.hi += (&power.hi * 9u32) / 8u32 + 1u32;
            return sum;
        }
    }
}

fn atanh_small(z: &Rational, w: u32) -> Enclosure {
    atanh_fixed(z, w as usize, w as usize + 16).to_enclosure()
}

fn ln2_cache() -> &'static Mutex<BTreeMap<u32, Enclosure>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Enclosure of `ln 2 = 2·atanh(1/3)` to about `2^-bits`.
pub fn ln2_enclosure(bits: u32) -> Enclosure {
    if let Ok(cache) = ln2_cache().lock() {
        if let Some((_, e)) = cache.range(bits..).next() {
            return e.clone();
        }
    }
    let e = atanh_small(&Rational::new(1.into(), 3.into()), bits + 2)
        .scale(&Rational::from_integer(2.into()))
        .round_outward(bits + 4);
    if let Ok(mut cache) = ln2_cache().lock() {
        cache.insert(bits, e.clone());
    }
    e
}

/// `ln x` for exact `x > 0` with absolute error about `2^-w`.
fn ln_bits(x: &Rational, w: u32) -> Enclosure {
    // x = 2^k · y with 1 ≤ y < 2, and ln y = 2·atanh((y−1)/(y+1))
    let (a, b) = (x.numer(), x.denom());
    let mut k = a.bits() as i64 - b.bits() as i64;
    let scaled = |k: i64| -> (BigInt, BigInt) {
        if k >= 0 {
            (a.clone(), b << k as usize)
        } else {
            (a << (-k) as usize, b.clone())
        }
    };
    let (mut num, mut den) = scaled(k);
    if num < den {
        k -= 1;
        (num, den) = scaled(k);
    } else if num >= &den * 2u32 {
        k += 1;
        (num, den) = scaled(k);
    }
    let z = Rational::new(&num - &den, &num + &den);
    let k_bits = 64 - k.unsigned_abs().leading_zeros() as usize;
    let g = w as usize + k_bits + 16;
    let at = atanh_fixed(&z, w as usize + k_bits + 4, g);
    let mut lo = &at.lo * 2u32;
    let mut hi = &at.hi * 2u32;
    if k != 0 {
        let l2 = ln2_enclosure(w + k_bits as u32 + 8);
        let l2 = Fixed {
            lo: scaled_bounds(l2.lo(), g).0,
            hi: scaled_bounds(l2.hi(), g).1,
            g,
        };
        let kb = BigInt::from(k);
        if k > 0 {
            lo += &l2.lo * &kb;
            hi += &l2.hi * &kb;
        } else {
            lo += &l2.hi * &kb;
            hi += &l2.lo * &kb;
        }
    }
    Fixed { lo, hi, g }.to_enclosure()
}

/// Enclosure of `ln x` for `x > 0`, width at most `width_cap`.
pub fn ln_enclosure(x: &Rational, width_cap: &Rational) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(domain(format!("logarithm of nonpositive number {x}")));
    }
    if !width_cap.is_positive() {
        return Err(domain("width cap must be positive"));
    }
    if x.is_one() {
        return Ok(Enclosure::zero());
    }
    let mut w = bits_for_width(width_cap) + 4;
    loop {
        let l = ln_bits(x, w);
        if le_q(&l.width(), width_cap) {
            return Ok(l);
        }
        w += 16;
    }
}

/// `e^t` for exact `t`, with relative error about `2^-w`.
fn exp_point(t: &Rational, w: u32) -> Enclosure {
    if t.is_zero() {
        return Enclosure::one();
    }
    // e^{|t|} from the series at |t|/2^s ≤ 1/2, squared s times
    let a = t.abs();
    let s = a.ceil().to_integer().bits() as usize + 1;
    let g = w as usize + s + 12;
    let r = Fixed::from_rational(&(a / pow2(s as i64)), g);
    let mut sum = Fixed::one(g);
    let mut term = Fixed::one(g);
    let mut j: u64 = 1;
    loop {
        term = term.mul(&r).div_small(j);
        sum.add(&term);
        if term.below(w as usize + s + 8) {
            break;
        }
        j += 1;
    }
    // consecutive terms shrink by at least 1/2, so the tail is below `term`
    sum.hi += &term.hi + 1u32;
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    let value = sum.to_enclosure();
    if t.is_negative() {
        value.recip().expect("exp is positive")
    } else {
        value
    }
}

/// Enclosure of `e^x` over an enclosure `x`, using monotonicity of exp.
/// `bits` sets the relative accuracy of each endpoint evaluation; the width
/// of `x` itself propagates unchanged.
pub fn exp_enclosure(x: &Enclosure, bits: u32) -> Enclosure {
    let lo = exp_point(x.lo(), bits);
    let d = x.width();
    let hi = if x.is_point() {
        lo.clone()
    } else if le_q(&d, &Rational::new(1.into(), 2.into())) {
        // e^d ≤ 1 + 2d for 0 ≤ d ≤ 1
        let f = Rational::one() + d * Rational::from_integer(2.into());
        Enclosure::point(lo.hi() * f)
    } else {
        exp_point(x.hi(), bits)
    };
    Enclosure::spanning(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of `base^e` for rational `base > 0` (or `base = 0` with
/// `e > 0`) and rational exponent `e`, width at most `width_cap`.
///
/// Integer exponents are exact. Exponents `p/q` with a small denominator
/// are computed as `base^⌊e⌋ · (base^{p mod q})^{1/q}` with an integer root;
/// anything else goes through `exp(e·ln base)`.
pub fn pow_enclosure(base: &Rational, e: &Rational, width_cap: &Rational) -> Result<Enclosure> {
    if base.is_negative() {
        return Err(domain(format!("real power of negative base {base}")));
    }
    if !width_cap.is_positive() {
        return Err(domain("width cap must be positive"));
    }
    if base.is_zero() {
        return if e.is_positive() {
            Ok(Enclosure::zero())
        } else {
            Err(domain("nonpositive power of zero"))
        };
    }
    if e.is_zero() || base.is_one() {
        return Ok(Enclosure::one());
    }
    if e.is_integer() {
        let k = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| domain(format!("exponent {e} too large")))?;
        return Ok(Enclosure::point(powi(base, k)));
    }
    let bits = bits_for_width(width_cap);
    let q = e.denom().to_u32().unwrap_or(u32::MAX);
    let floor = e.floor().to_integer();
    let frac_num = e.numer() - &floor * e.denom();
    let base_bits = base.numer().bits().max(base.denom().bits());
    let frac = frac_num.to_u64().unwrap_or(u64::MAX);
    if q <= 64 && base_bits.saturating_mul(frac) <= 8192 {
        if let Some(fi) = floor.to_i64() {
            let int_part = powi(base, fi);
            let radicand = powi(base, frac as i64);
            let mag = int_part.ceil().to_integer().max(BigInt::one());
            let inner_cap = width_cap / Rational::from_integer(mag * 4);
            let root = nth_root_enclosure(&radicand, q, &inner_cap)?;
            let out = root.scale(&int_part);
            return Ok(if out.is_point() {
                out
            } else {
                out.round_outward(bits + 2)
            });
        }
    }
    let est = e.to_f64().unwrap_or(0.0) * base.to_f64().unwrap_or(1.0).ln();
    let mag_bits = if est.is_finite() && est > 0.0 {
        (est * std::f64::consts::LOG2_E).ceil() as u32
    } else {
        0
    };
    let e_bits = e.abs().ceil().to_integer().bits() as u32;
    let mut w = bits + 8;
    loop {
        let ln = ln_bits(base, w + mag_bits + e_bits + 4);
        let y = ln.scale(e);
        let value = exp_enclosure(&y, w + 4).round_outward(bits + 2);
        if le_q(&value.width(), width_cap) {
            return Ok(value);
        }
        w += 24;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, rat, to_f64};

    fn cap(bits: i64) -> Rational {
        pow2(-bits)
    }

    #[test]
    fn perfect_squares_are_exact() {
        let r = sqrt_enclosure(&int(4), &rat(1, 1000)).unwrap();
        assert!(r.is_point());
        assert_eq!(r.lo(), &int(2));
        let r = sqrt_enclosure(&rat(9, 16), &rat(1, 1000)).unwrap();
        assert_eq!(r.lo(), &rat(3, 4));
    }

    #[test]
    fn negative_sqrt_is_a_domain_error() {
        assert!(sqrt_enclosure(&int(-1), &rat(1, 10)).is_err());
    }

    #[test]
    fn cube_root_brackets_value() {
        let r = nth_root_enclosure(&int(2), 3, &cap(60)).unwrap();
        assert!(r.width() <= cap(60));
        let cube = r.powi(3);
        assert!(cube.contains(&int(2)));
        assert!(nth_root_enclosure(&int(27), 3, &cap(10)).unwrap().is_point());
    }

    #[test]
    fn ln_matches_float() {
        for (x, want) in [(int(2), 2f64.ln()), (int(10_000), 10_000f64.ln()), (rat(1, 7), (1.0f64 / 7.0).ln())] {
            let l = ln_enclosure(&x, &cap(100)).unwrap();
            assert!(l.width() <= cap(100));
            assert!((l.mid_f64() - want).abs() < 1e-14, "{x}: {l}");
        }
        assert!(ln_enclosure(&int(0), &cap(10)).is_err());
    }

    #[test]
    fn exp_matches_float() {
        for t in [rat(1, 1), rat(-7, 3), rat(25, 1), rat(1, 1000)] {
            let v = exp_enclosure(&Enclosure::point(t.clone()), 80);
            let want = to_f64(&t).exp();
            assert!(((v.mid_f64() - want) / want).abs() < 1e-14, "{t}: {v}");
            assert!(to_f64(&(v.width() / v.lo())) < 1e-20);
        }
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        let x = rat(37, 5);
        let l = ln_enclosure(&x, &cap(120)).unwrap();
        let back = exp_enclosure(&l, 120);
        assert!(back.contains(&x));
    }

    #[test]
    fn powers_by_both_routes_agree() {
        let via_root = pow_enclosure(&int(7), &rat(13, 5), &cap(100)).unwrap();
        assert!(via_root.width() <= cap(100));
        // 1/1000 has denominator > 64 so this goes through exp/ln
        let e = rat(2601, 1000);
        let via_exp = pow_enclosure(&int(7), &e, &cap(100)).unwrap();
        assert!(via_exp.width() <= cap(100));
        assert!((via_root.mid_f64() - 7f64.powf(2.6)).abs() < 1e-10);
        assert!((via_exp.mid_f64() - 7f64.powf(2.601)).abs() < 1e-10);
        let neg = pow_enclosure(&int(10_000), &rat(-5, 2), &cap(140)).unwrap();
        assert!(neg.contains(&rat(1, 10_000_000_000)));
        assert!(neg.is_point());
    }

    #[test]
    fn pi_is_tight() {
        let p = pi_enclosure(&cap(200)).unwrap();
        assert!(p.width() <= cap(200));
        assert!((p.mid_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}
