//! Euler–Maclaurin bounds for zeta tails and power partial sums.
//!
//! With `f(x) = x^{−α−1}`, one summation step gives
//!
//! ```text
//! Σ_{n>m} n^{−α−1} ≤ m^{−α}/α − m^{−α−1}/2 + (α+1)/12 · m^{−α−2}
//! ```
//!
//! for every `α > 0`, `m ≥ 1`, and two steps with `f(x) = x^{α−1}` give
//!
//! ```text
//! Σ_{n≤m} n^{α−1} ≤ m^α/α + m^{α−1}/2 + (α−1)/12 · m^{α−2} − C₅(α),
//! C₅(α) = (3−α)(5−α)(6−α)(8+α)/(720α),
//! ```
//!
//! valid for `1 ≤ α ≤ 2`. Each bound is a single power of `m` times a
//! rational, so it is evaluated generically over [`Scalar`]: exactly as a
//! [`Surd`] when `α` has denominator 1 or 2, and as an [`Enclosure`]
//! otherwise.

use num_traits::{One, Signed};

use crate::error::{domain, Result};
use crate::numerics::{int, BernoulliPoly, Enclosure, KahanSum, Precision, Rational, Scalar, Surd};

/// An upper or lower bound, kept exactly when the powers involved are
/// square roots of integers.
#[derive(Clone, Debug, PartialEq)]
pub struct EmBound {
    pub exact: Option<Surd>,
    pub enclosure: Enclosure,
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha.is_positive() {
        Ok(())
    } else {
        Err(domain(format!("alpha = {alpha} must be positive")))
    }
}

fn check_m(m: u64) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(domain("m must be at least 1"))
    }
}

/// Whether `n^e` stays inside `Q(√2, √3, …)` for the exponents used here.
pub fn has_surd_form(alpha: &Rational) -> bool {
    alpha.denom() <= &2.into()
}

/// Runs a generic formula as a surd when possible, else as an enclosure.
fn dual<F, G>(
    alpha: &Rational,
    exact_ok: bool,
    prec: &Precision,
    surd: F,
    enc: G,
) -> Result<EmBound>
where
    F: Fn() -> Result<Surd>,
    G: Fn() -> Result<Enclosure>,
{
    if has_surd_form(alpha) && exact_ok {
        let s = surd()?;
        let enclosure = s.to_enclosure(&prec.width_cap());
        Ok(EmBound {
            exact: Some(s),
            enclosure,
        })
    } else {
        Ok(EmBound {
            exact: None,
            enclosure: enc()?,
        })
    }
}

/// `C₅(α) = (3−α)(5−α)(6−α)(8+α)/(720α)`.
pub fn c5(alpha: &Rational) -> Rational {
    let a = alpha;
    (int(3) - a) * (int(5) - a) * (int(6) - a) * (int(8) + a) / (int(720) * a)
}

pub fn tail_upper_bound_in<T: Scalar>(alpha: &Rational, m: u64, prec: &Precision) -> Result<T> {
    check_alpha(alpha)?;
    check_m(m)?;
    let mr = int(m as i64);
    let factor = alpha.recip() - (int(2) * &mr).recip() + (alpha + int(1)) / (int(12) * &mr * &mr);
    Ok(T::int_power(m, &-alpha.clone(), prec)?.scale(&factor))
}

/// Upper bound for `Σ_{n>m} n^{−α−1}`.
pub fn tail_upper_bound(alpha: &Rational, m: u64, prec: &Precision) -> Result<EmBound> {
    dual(
        alpha,
        true,
        prec,
        || tail_upper_bound_in::<Surd>(alpha, m, prec),
        || tail_upper_bound_in::<Enclosure>(alpha, m, prec),
    )
}

/// Trapezoid lower bound `m^{−α}/α − m^{−α−1}/2` for `Σ_{n>m} n^{−α−1}`,
/// valid because `x^{−α−1}` is convex.
pub fn tail_lower_bound_in<T: Scalar>(alpha: &Rational, m: u64, prec: &Precision) -> Result<T> {
    check_alpha(alpha)?;
    check_m(m)?;
    let factor = alpha.recip() - int(2 * m as i64).recip();
    Ok(T::int_power(m, &-alpha.clone(), prec)?.scale(&factor))
}

pub fn tail_lower_bound(alpha: &Rational, m: u64, prec: &Precision) -> Result<EmBound> {
    dual(
        alpha,
        true,
        prec,
        || tail_lower_bound_in::<Surd>(alpha, m, prec),
        || tail_lower_bound_in::<Enclosure>(alpha, m, prec),
    )
}

pub fn partial_sum_upper_bound_in<T: Scalar>(
    alpha: &Rational,
    m: u64,
    prec: &Precision,
) -> Result<T> {
    if alpha < &Rational::one() || alpha > &int(2) {
        return Err(domain(format!(
            "partial-sum bound needs 1 ≤ alpha ≤ 2, got {alpha}"
        )));
    }
    check_m(m)?;
    let mr = int(m as i64);
    let factor = alpha.recip() + (int(2) * &mr).recip() + (alpha - int(1)) / (int(12) * &mr * &mr);
    let main = T::int_power(m, alpha, prec)?.scale(&factor);
    Ok(main.minus(&T::from_rational(c5(alpha))))
}

/// Upper bound for `Σ_{n≤m} n^{α−1}`, `1 ≤ α ≤ 2`.
pub fn partial_sum_upper_bound(alpha: &Rational, m: u64, prec: &Precision) -> Result<EmBound> {
    dual(
        alpha,
        true,
        prec,
        || partial_sum_upper_bound_in::<Surd>(alpha, m, prec),
        || partial_sum_upper_bound_in::<Enclosure>(alpha, m, prec),
    )
}

/// `Σ_{n=from}^{to} n^e`; empty ranges give zero.
pub fn power_sum<T: Scalar>(e: &Rational, from: u64, to: u64, prec: &Precision) -> Result<T> {
    let mut acc = T::from_rational(int(0));
    for n in from.max(1)..=to {
        acc = acc.plus(&T::int_power(n, e, prec)?).settle(prec);
    }
    Ok(acc)
}

/// Per-term precision so that `terms` accumulated widths stay below `cap`.
pub fn term_precision(cap: &Rational, terms: u64) -> Precision {
    let extra = 64 - terms.max(1).leading_zeros() + 2;
    Precision::from_width_cap(cap).finer(extra)
}

/// An enclosure of `ζ(s)`, `s = 1 + α`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValue {
    pub s: Rational,
    pub enclosure: Enclosure,
    pub split: u64,
    pub method: String,
    /// The upper endpoint formula `Σ_{n≤split} n^{−s} + tail bound`, exact
    /// when it is a surd and the split is small.
    pub exact_upper: Option<Surd>,
    /// Enclosure of the upper endpoint formula itself.
    pub upper: Enclosure,
}

impl ZetaValue {
    pub fn lo(&self) -> &Rational {
        self.enclosure.lo()
    }

    pub fn hi(&self) -> &Rational {
        self.enclosure.hi()
    }
}

/// Largest split for which the exact surd form of the upper endpoint is kept.
pub const EXACT_SPLIT_LIMIT: u64 = 256;

/// Encloses `ζ(1+α)` from the first `split` terms: the upper endpoint adds
/// the Euler–Maclaurin tail bound, the lower one the trapezoid tail bound.
pub fn zeta_upper_enclosure(alpha: &Rational, split: u64, width_cap: &Rational) -> Result<ZetaValue> {
    check_alpha(alpha)?;
    check_m(split)?;
    let prec = term_precision(width_cap, split + 2);
    let s = alpha + int(1);
    let partial: Enclosure = power_sum(&-s.clone(), 1, split, &prec)?;
    let upper_tail: Enclosure = tail_upper_bound_in(alpha, split, &prec)?;
    let lower_tail: Enclosure = tail_lower_bound_in(alpha, split, &prec)?;
    let exact_upper = if has_surd_form(alpha) && split <= EXACT_SPLIT_LIMIT {
        let p: Surd = power_sum(&-s.clone(), 1, split, &prec)?;
        Some(p.plus(&tail_upper_bound_in::<Surd>(alpha, split, &prec)?))
    } else {
        None
    };
    let upper = &partial + &upper_tail;
    let lower = &partial + &lower_tail;
    let enclosure = Enclosure::new(lower.lo().clone(), upper.hi().clone())?;
    Ok(ZetaValue {
        s,
        enclosure,
        split,
        method: format!("partial sum to {split} + Euler–Maclaurin tail"),
        exact_upper,
        upper,
    })
}

/// A lower bound for `ζ(1+α)`: the first `m` terms, plus the integral tail
/// `(1/α)(m+1)^{−α}` when `with_tail` is set.
pub fn zeta_lower_bound(alpha: &Rational, m: u64, with_tail: bool, prec: &Precision) -> Result<EmBound> {
    check_alpha(alpha)?;
    check_m(m)?;
    let s = -(alpha + int(1));
    let inner = term_precision(&prec.width_cap(), m + 1);
    dual(
        alpha,
        m <= EXACT_SPLIT_LIMIT,
        prec,
        || {
            let p: Surd = power_sum(&s, 1, m, &inner)?;
            if with_tail {
                let t = Surd::int_power(m + 1, &-alpha.clone())?.scale(&alpha.recip());
                Ok(p.plus(&t))
            } else {
                Ok(p)
            }
        },
        || {
            let p: Enclosure = power_sum(&s, 1, m, &inner)?;
            if with_tail {
                let t = Enclosure::int_power(m + 1, &-alpha.clone(), &inner)?;
                Ok(p + t.scale(&alpha.recip()))
            } else {
                Ok(p)
            }
        },
    )
}

/// Simpson's rule on `[a, b]` with `panels` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = KahanSum::new();
    acc.add(f(a) + f(b));
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

/// Finer cells near the origin, where the derivatives are steep.
fn panels(k: u64) -> usize {
    if k < 16 {
        2048
    } else {
        64
    }
}

/// Float diagnostic for one summation step at `f(x) = x^{−α−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderCheck {
    pub m: u64,
    /// `Σ_{n>m} f(n)` (or `Σ_{n≤m}` for the two-step check) by direct summation.
    pub direct: f64,
    /// The Euler–Maclaurin terms without remainder.
    pub main: f64,
    /// The Bernoulli remainder integral by quadrature.
    pub remainder: f64,
    /// `direct − main − remainder`; zero up to quadrature error.
    pub residual: f64,
}

/// Checks `Σ_{n>m} f(n) = ∫_m^∞ f − f(m)/2 − f′(m)/12 + R` with
/// `R = (1/6)∫_m^∞ b₃({x}) f‴(x) dx`, integrating the remainder over
/// `periods` unit cells.
pub fn one_step_remainder_check(alpha: f64, m: u64, periods: u64) -> RemainderCheck {
    let b3 = BernoulliPoly::b3();
    let c3 = -(alpha + 1.0) * (alpha + 2.0) * (alpha + 3.0);
    let f3 = |x: f64| c3 * x.powf(-alpha - 4.0);
    let mut rem = KahanSum::new();
    for k in m..m + periods {
        let k0 = k as f64;
        rem.add(simpson(|x| b3.eval_f64(x - k0) * f3(x), k0, k0 + 1.0, panels(k)) / 6.0);
    }
    let mf = m as f64;
    let main = mf.powf(-alpha) / alpha - mf.powf(-alpha - 1.0) / 2.0
        + (alpha + 1.0) / 12.0 * mf.powf(-alpha - 2.0);
    let direct = float_tail(alpha, m);
    RemainderCheck {
        m,
        direct,
        main,
        remainder: rem.value(),
        residual: direct - main - rem.value(),
    }
}

/// `Σ_{n>m} n^{−α−1}` in floating point: direct terms to `m + 10⁵`, then the
/// Euler–Maclaurin estimate, whose error there is far below `10⁻¹⁵`.
pub fn float_tail(alpha: f64, m: u64) -> f64 {
    let n = m + 100_000;
    let mut acc = KahanSum::new();
    for k in (m + 1..=n).rev() {
        acc.add((k as f64).powf(-alpha - 1.0));
    }
    let nf = n as f64;
    acc.add(
        nf.powf(-alpha) / alpha - nf.powf(-alpha - 1.0) / 2.0
            + (alpha + 1.0) / 12.0 * nf.powf(-alpha - 2.0),
    );
    acc.value()
}

/// Checks the two-step identity for `f(x) = x^{α−1}` on `[1, m]`:
/// `Σ_{n≤m} f(n) = ∫_1^m f + (f(1)+f(m))/2 + (f′(m)−f′(1))/12
/// − (f‴(m)−f‴(1))/720 + R` with `R = (1/120)∫_1^m b₅({x}) f⁽⁵⁾(x) dx`.
pub fn two_step_remainder_check(alpha: f64, m: u64) -> RemainderCheck {
    let b5 = BernoulliPoly::b5();
    let a = alpha;
    let c5 = (a - 1.0) * (a - 2.0) * (a - 3.0) * (a - 4.0) * (a - 5.0);
    let f5 = |x: f64| c5 * x.powf(a - 6.0);
    let mut rem = KahanSum::new();
    for k in 1..m {
        let k0 = k as f64;
        rem.add(simpson(|x| b5.eval_f64(x - k0) * f5(x), k0, k0 + 1.0, panels(k)) / 120.0);
    }
    let mf = m as f64;
    let f = |x: f64| x.powf(a - 1.0);
    let f1 = |x: f64| (a - 1.0) * x.powf(a - 2.0);
    let f3 = |x: f64| (a - 1.0) * (a - 2.0) * (a - 3.0) * x.powf(a - 4.0);
    let main = (mf.powf(a) - 1.0) / a + (f(1.0) + f(mf)) / 2.0 + (f1(mf) - f1(1.0)) / 12.0
        - (f3(mf) - f3(1.0)) / 720.0;
    let direct: f64 = (1..=m).map(|n| f(n as f64)).collect::<KahanSum>().value();
    RemainderCheck {
        m,
        direct,
        main,
        remainder: rem.value(),
        residual: direct - main - rem.value(),
    }
}
