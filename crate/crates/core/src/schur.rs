//! Discrete Schur test for the max family with the two-level weight
//! `ω(1) = δ`, `ω(m) = m^{−1/2}` for `m ≥ 2`.
//!
//! With the normalized row sum
//!
//! ```text
//! S(m) = √m Σ_{n≥1} K_α(m, n)/√n = m^{−α} Σ_{n≤m} n^{α−1} + m^α Σ_{n>m} n^{−α−1}
//! ```
//!
//! the weight gives the constant `2/α` iff some `δ` satisfies
//! `(ζ(1+α) − 1)/(2/α − 1) ≤ δ ≤ 1 + m^α(2/α − S(m))` for every `m ≥ 2`,
//! i.e. iff the criterion margin
//!
//! ```text
//! 2/α + (2/α − 1) m^α (2/α − S(m)) − ζ(1+α)
//! ```
//!
//! is nonnegative for every `m ≥ 2`. Margins are evaluated with the zeta
//! value substituted once, as `Σ_{n≤m}` plus the tail `T_m = Σ_{n>m}`, so
//! that the enclosure of `T_m` is the only wide ingredient.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::eulermaclaurin::{
    c5, has_surd_form, power_sum, tail_lower_bound_in, tail_upper_bound_in, term_precision,
    zeta_upper_enclosure,
};
use crate::kernels::{profile_monotonicity, Kernel};
use crate::numerics::{
    format_decimal, int, parse_fraction, pow2, rat, Enclosure, Precision, Rational, Rounding,
    Scalar, Surd,
};
use crate::TOOL_VERSION;

/// Digits after the point in serialized enclosures.
pub const DECIMAL_DIGITS: usize = 30;

fn check_alpha_open(alpha: &Rational) -> Result<()> {
    if alpha.is_positive() && alpha < &int(2) {
        Ok(())
    } else {
        Err(domain(format!(
            "alpha = {alpha} must lie in (0, 2) for a positive weight"
        )))
    }
}

/// `2/α − 1`, positive on `(0, 2)`.
fn weight_gap(alpha: &Rational) -> Rational {
    int(2) / alpha - int(1)
}

fn pow_enc(n: u64, e: &Rational, prec: &Precision) -> Result<Enclosure> {
    <Enclosure as Scalar>::int_power(n, e, prec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurWeight {
    alpha: Rational,
    delta: Rational,
}

impl SchurWeight {
    pub fn new(alpha: Rational, delta: Rational) -> Result<Self> {
        check_alpha_open(&alpha)?;
        if !delta.is_positive() {
            return Err(domain(format!("delta = {delta} must be positive")));
        }
        Ok(SchurWeight { alpha, delta })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn weight_f64(&self, m: u64) -> f64 {
        if m == 1 {
            crate::numerics::to_f64(&self.delta)
        } else {
            (m as f64).powf(-0.5)
        }
    }

    /// `Σ_{n≤terms} K_α(m, n) ω(n) / ω(m)` in floating point; the Schur test
    /// asks for this to stay below `2/α` as `terms → ∞`.
    pub fn ratio_f64(&self, m: u64, terms: u64) -> f64 {
        let k = Kernel::max_family_f64(crate::numerics::to_f64(&self.alpha))
            .expect("alpha checked positive");
        let mf = m as f64;
        let mut acc = crate::numerics::KahanSum::new();
        for n in (1..=terms).rev() {
            acc.add(k.eval_f64(mf, n as f64) * self.weight_f64(n));
        }
        acc.value() / self.weight_f64(m)
    }
}

/// One normalized row sum `S(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurRow {
    pub m: u64,
    pub row_sum: Enclosure,
    pub tail_method: String,
}

/// Prefix and tail sums shared by all rows `m ≤ m_max`.
#[derive(Clone, Debug)]
pub struct RowTable {
    alpha: Rational,
    tail_split: u64,
    /// `A_m = Σ_{n≤m} n^{α−1}`, indexed by `m`.
    up: Vec<Enclosure>,
    /// `B_m = Σ_{n≤m} n^{−α−1}`.
    down: Vec<Enclosure>,
    /// `T_m = Σ_{n>m} n^{−α−1}`.
    tail: Vec<Enclosure>,
    /// `m^α`.
    m_pow: Vec<Enclosure>,
}

impl RowTable {
    /// Direct terms up to `max(tail_split, m_max)`, then the Euler–Maclaurin
    /// upper and trapezoid lower tail bounds.
    pub fn build(alpha: &Rational, m_max: u64, tail_split: u64, prec: &Precision) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(domain(format!("alpha = {alpha} must be positive")));
        }
        let m_max = m_max.max(1);
        let split = tail_split.max(m_max);
        let p = term_precision(&prec.width_cap(), split + 2);
        let e_down = -(alpha + int(1));
        let e_up = alpha - int(1);

        let far: Enclosure = power_sum(&e_down, m_max + 1, split, &p)?;
        let hi: Enclosure = tail_upper_bound_in(alpha, split, &p)?;
        let lo: Enclosure = tail_lower_bound_in(alpha, split, &p)?;
        let beyond = Enclosure::new(lo.lo().clone(), hi.hi().clone())?;

        let mut down_terms = vec![Enclosure::zero()];
        let mut m_pow = vec![Enclosure::zero()];
        let mut up = vec![Enclosure::zero()];
        for n in 1..=m_max {
            let d = pow_enc(n, &e_down, &p)?;
            let u = pow_enc(n, &e_up, &p)?;
            m_pow.push(u.scale(&int(n as i64)));
            let next = up[n as usize - 1].clone() + &u;
            up.push(next.round_outward(p.bits() + 8));
            down_terms.push(d);
        }
        let mut down = vec![Enclosure::zero()];
        for n in 1..=m_max as usize {
            let next = down[n - 1].clone() + &down_terms[n];
            down.push(next.round_outward(p.bits() + 8));
        }
        let mut tail = vec![Enclosure::zero(); m_max as usize + 1];
        tail[m_max as usize] = (far + beyond).round_outward(p.bits() + 8);
        for m in (0..m_max as usize).rev() {
            tail[m] = (tail[m + 1].clone() + &down_terms[m + 1]).round_outward(p.bits() + 8);
        }
        Ok(RowTable {
            alpha: alpha.clone(),
            tail_split: split,
            up,
            down,
            tail,
            m_pow,
        })
    }

    pub fn m_max(&self) -> u64 {
        self.up.len() as u64 - 1
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    fn idx(&self, m: u64) -> Result<usize> {
        if m == 0 || m > self.m_max() {
            return Err(domain(format!("row m = {m} outside [1, {}]", self.m_max())));
        }
        Ok(m as usize)
    }

    /// `ζ(1+α) = B_m + T_m`; independent of `m` up to enclosure width.
    pub fn zeta(&self) -> Enclosure {
        &self.down[1] + &self.tail[1]
    }

    pub fn row(&self, m: u64) -> Result<SchurRow> {
        let i = self.idx(m)?;
        let mp = &self.m_pow[i];
        let s = self.up[i].checked_div(mp)? + mp * &self.tail[i];
        Ok(SchurRow {
            m,
            row_sum: s,
            tail_method: format!(
                "direct terms to {}, Euler–Maclaurin tail bounds beyond",
                self.tail_split
            ),
        })
    }

    /// `1 + m^α(2/α − S(m))`, the largest admissible `δ` for row `m`.
    pub fn delta_upper(&self, m: u64) -> Result<Enclosure> {
        let i = self.idx(m)?;
        let mp = &self.m_pow[i];
        let two_over = int(2) / &self.alpha;
        // m^α(2/α) − A_m − m^{2α} T_m
        let v = mp.scale(&two_over) - &self.up[i] - &(&mp.powi(2) * &self.tail[i]);
        Ok(v.add_rational(&int(1)))
    }

    /// The criterion margin at row `m ≥ 2`.
    pub fn margin(&self, m: u64) -> Result<Enclosure> {
        check_alpha_open(&self.alpha)?;
        let i = self.idx(m)?;
        if m < 2 {
            return Err(domain("criterion margins start at m = 2"));
        }
        let c = weight_gap(&self.alpha);
        let two_over = int(2) / &self.alpha;
        let mp = &self.m_pow[i];
        let coef = mp.powi(2).scale(&c).add_rational(&int(1));
        let v = (mp.scale(&two_over) - &self.up[i]).scale(&c) - &self.down[i] - &(&coef * &self.tail[i]);
        Ok(v.add_rational(&two_over))
    }
}

/// Enclosure of `S(m)` using direct terms up to `tail_split`.
pub fn row_sum(alpha: &Rational, m: u64, tail_split: u64, prec: &Precision) -> Result<SchurRow> {
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    RowTable::build(alpha, m, tail_split, prec)?.row(m)
}

/// The Euler–Maclaurin upper bound of `S(m)`, `1 ≤ α ≤ 2`:
/// `m^{−α}·(partial-sum bound) + m^α·(tail bound)`.
pub fn row_sum_em_bound(alpha: &Rational, m: u64, prec: &Precision) -> Result<Enclosure> {
    use crate::eulermaclaurin::partial_sum_upper_bound_in;
    let p = prec.finer(8);
    let ps: Enclosure = partial_sum_upper_bound_in(alpha, m, &p)?;
    let tb: Enclosure = tail_upper_bound_in(alpha, m, &p)?;
    let mp = pow_enc(m, alpha, &p)?;
    Ok(ps.checked_div(&mp)? + &mp * &tb)
}

/// Criterion margin at a single row.
pub fn criterion_margin(alpha: &Rational, m: u64, tail_split: u64, prec: &Precision) -> Result<Enclosure> {
    check_alpha_open(alpha)?;
    if m < 2 {
        return Err(domain("criterion margins start at m = 2"));
    }
    RowTable::build(alpha, m, tail_split, prec)?.margin(m)
}

/// A quantity carried exactly when `α` is a half-integer.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantity {
    pub exact: Option<Surd>,
    pub enclosure: Enclosure,
}

impl Quantity {
    fn from_scalar<F, G>(alpha: &Rational, prec: &Precision, surd: F, enc: G) -> Result<Self>
    where
        F: FnOnce() -> Result<Surd>,
        G: FnOnce() -> Result<Enclosure>,
    {
        if has_surd_form(alpha) {
            let s = surd()?;
            Ok(Quantity {
                enclosure: s.to_enclosure(&prec.width_cap()),
                exact: Some(s),
            })
        } else {
            Ok(Quantity {
                exact: None,
                enclosure: enc()?,
            })
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "{:.20}", self.enclosure),
        }
    }
}

/// `G(α) = (α/6)2^{α−2} − C₅(α)`, with `S(m) ≤ 2/α + G(α)/m^α` for all
/// `m ≥ 2`, and the induced all-`m` criterion bound `2/α − (2/α − 1)G(α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformMargin {
    pub g: Quantity,
    pub induced_bound: Quantity,
}

fn g_in<T: Scalar>(alpha: &Rational, prec: &Precision) -> Result<T> {
    let p = T::int_power(2, &(alpha - int(2)), prec)?.scale(&(alpha / int(6)));
    Ok(p.minus(&T::from_rational(c5(alpha))))
}

fn induced_in<T: Scalar>(alpha: &Rational, prec: &Precision) -> Result<T> {
    let g: T = g_in(alpha, prec)?;
    Ok(T::from_rational(int(2) / alpha).minus(&g.scale(&weight_gap(alpha))))
}

pub fn uniform_margin(alpha: &Rational, prec: &Precision) -> Result<UniformMargin> {
    if alpha < &Rational::one() || alpha >= &int(2) {
        return Err(domain(format!(
            "uniform bound needs 1 ≤ alpha < 2, got {alpha}"
        )));
    }
    let p = prec.finer(8);
    Ok(UniformMargin {
        g: Quantity::from_scalar(alpha, prec, || g_in::<Surd>(alpha, &p), || g_in::<Enclosure>(alpha, &p))?,
        induced_bound: Quantity::from_scalar(
            alpha,
            prec,
            || induced_in::<Surd>(alpha, &p),
            || induced_in::<Enclosure>(alpha, &p),
        )?,
    })
}

/// The all-`m` comparison `ζ(1+α) ≤ zeta bound < induced bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformComparison {
    pub zeta_bound: Quantity,
    pub induced_bound: Quantity,
    pub split: u64,
    /// Decided from the exact surds when available, else from enclosures.
    pub holds: bool,
}

pub fn uniform_comparison(alpha: &Rational, split: u64, prec: &Precision) -> Result<UniformComparison> {
    let u = uniform_margin(alpha, prec)?;
    let z = zeta_upper_enclosure(alpha, split, &prec.width_cap())?;
    let zeta_bound = Quantity {
        exact: z.exact_upper.clone(),
        enclosure: z.upper.clone(),
    };
    let holds = match (&zeta_bound.exact, &u.induced_bound.exact) {
        (Some(a), Some(b)) => a.cmp_value(b) == Ordering::Less,
        _ => zeta_bound.enclosure.certainly_lt(&u.induced_bound.enclosure),
    };
    Ok(UniformComparison {
        zeta_bound,
        induced_bound: u.induced_bound,
        split,
        holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Falsified,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::Falsified => 1,
            Status::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::Falsified => "falsified",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginRecord {
    pub m: u64,
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaRecord {
    pub s: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformRecord {
    pub split: u64,
    pub zeta_bound: String,
    pub induced_bound: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: String,
    pub status: Status,
    /// `2/α` when certified.
    pub constant: Option<String>,
    pub method: String,
    pub finite_range: [u64; 2],
    pub uniform_bound: bool,
    pub margins: Vec<MarginRecord>,
    pub zeta: ZetaRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<UniformRecord>,
    pub tail_split: u64,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad certificate: {e}")))
    }

    /// Re-runs the certification with the recorded parameters.
    pub fn recheck(&self, prec: &Precision) -> Result<Recheck> {
        let alpha = parse_fraction(&self.alpha)?;
        let opts = CertifyOptions {
            finite_m: self.finite_range[1],
            tail_split: self.tail_split,
            precision: *prec,
            ..CertifyOptions::default()
        };
        let fresh = certify(&alpha, &opts)?;
        Ok(Recheck {
            recorded: self.status,
            status: fresh.status,
            matches: fresh.status == self.status,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Recheck {
    pub recorded: Status,
    pub status: Status,
    pub matches: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub finite_m: u64,
    pub tail_split: u64,
    /// Split for the zeta bound in the uniform comparison.
    pub zeta_split: u64,
    pub precision: Precision,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            finite_m: 64,
            tail_split: 10_000,
            zeta_split: 4,
            precision: Precision::default(),
        }
    }
}

fn enclosure_strings(e: &Enclosure) -> (String, String) {
    e.to_decimal_pair(DECIMAL_DIGITS)
}

/// Certifies `C_α = 2/α` for the max family, or reports why not.
///
/// For `α < 1` the profile is decreasing on `(0, ∞)` and the constant is the
/// profile integral. For `1 ≤ α < 2` the uniform bound alone may suffice;
/// otherwise the finite margins on `[2, M]` must be positive and the tail
/// estimate `2/α + (2/α−1)(C₅ − (α/6)(M+1)^{α−2}) > ζ(1+α)` must cover
/// `m > M`. Any margin with a negative upper end falsifies this weight.
pub fn certify(alpha: &Rational, opts: &CertifyOptions) -> Result<Certificate> {
    check_alpha_open(alpha)?;
    let m_max = opts.finite_m.max(2);
    let prec = opts.precision;
    let table = RowTable::build(alpha, m_max, opts.tail_split, &prec)?;
    let mut margins = Vec::new();
    let mut records = Vec::new();
    for m in 2..=m_max {
        let e = table.margin(m)?;
        let (lo, hi) = enclosure_strings(&e);
        records.push(MarginRecord { m, lo, hi });
        margins.push(e);
    }
    let zeta = table.zeta();
    let (zlo, zhi) = enclosure_strings(&zeta);
    let zeta_record = ZetaRecord {
        s: (alpha + int(1)).to_string(),
        lo: zlo,
        hi: zhi,
    };

    let any_negative = margins.iter().any(Enclosure::is_negative);
    let all_positive = margins.iter().all(Enclosure::is_positive);
    let mut uniform = None;
    let mut uniform_used = false;
    let (status, method) = if alpha < &Rational::one() {
        let kernel = Kernel::max_family(alpha.clone())?;
        let mono = profile_monotonicity(&kernel).expect("closed family");
        if mono.decreasing_everywhere {
            (Status::Certified, "profile decreasing on (0, ∞)".to_string())
        } else {
            (Status::Inconclusive, "profile not monotone".to_string())
        }
    } else {
        let cmp = uniform_comparison(alpha, opts.zeta_split, &prec)?;
        let holds = cmp.holds;
        uniform = Some(UniformRecord {
            split: cmp.split,
            zeta_bound: cmp.zeta_bound.to_string(),
            induced_bound: cmp.induced_bound.to_string(),
            holds,
        });
        if holds {
            uniform_used = true;
            (Status::Certified, "uniform Euler–Maclaurin bound for all m ≥ 2".to_string())
        } else if any_negative {
            let m = margins.iter().position(Enclosure::is_negative).unwrap() as u64 + 2;
            (Status::Falsified, format!("criterion margin negative at m = {m}"))
        } else if all_positive && tail_covered(alpha, m_max, &zeta, &prec)? {
            (
                Status::Certified,
                format!("finite margins on [2, {m_max}] and tail estimate beyond"),
            )
        } else {
            (Status::Inconclusive, "margins undecided".to_string())
        }
    };
    let constant = (status == Status::Certified).then(|| (int(2) / alpha).to_string());
    Ok(Certificate {
        alpha: alpha.to_string(),
        status,
        constant,
        method,
        finite_range: [2, m_max],
        uniform_bound: uniform_used,
        margins: records,
        zeta: zeta_record,
        uniform,
        tail_split: table.tail_split,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: None,
    })
}

/// Whether `2/α + (2/α−1)(C₅ − (α/6)(M+1)^{α−2})` exceeds `ζ(1+α)`.
fn tail_covered(alpha: &Rational, m_max: u64, zeta: &Enclosure, prec: &Precision) -> Result<bool> {
    let p = pow_enc(m_max + 1, &(alpha - int(2)), prec)?.scale(&(alpha / int(6)));
    let inner = (-p).add_rational(&c5(alpha));
    let rhs = inner.scale(&weight_gap(alpha)).add_rational(&(int(2) / alpha));
    Ok(zeta.certainly_lt(&rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Euler–Maclaurin bounds throughout; exact when `α` is a half-integer.
    EmCertified,
    /// Enclosed row sums on `[2, M]`.
    Numeric,
}

/// Feasibility interval for `δ = ω(1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaInterval {
    pub mode: DeltaMode,
    pub lower: Quantity,
    pub upper: Quantity,
    /// Row attaining the minimum in numeric mode.
    pub binding_m: Option<u64>,
    /// `Some(true)` if certainly nonempty, `Some(false)` if certainly empty.
    pub feasible: Option<bool>,
}

pub fn delta_interval(
    alpha: &Rational,
    mode: DeltaMode,
    finite_m: u64,
    tail_split: u64,
    prec: &Precision,
) -> Result<DeltaInterval> {
    check_alpha_open(alpha)?;
    let c = weight_gap(alpha);
    let (lower, upper, binding_m) = match mode {
        DeltaMode::EmCertified => {
            let u = uniform_margin(alpha, prec)?;
            let z = zeta_upper_enclosure(alpha, 4, &prec.width_cap())?;
            let one = Surd::from_rational(int(1));
            let lower = Quantity {
                exact: z.exact_upper.as_ref().map(|s| s.minus(&one).scale(&c.recip())),
                enclosure: z.upper.add_rational(&int(-1)).scale(&c.recip()),
            };
            let upper = Quantity {
                exact: u.g.exact.as_ref().map(|g| one.minus(g)),
                enclosure: (-u.g.enclosure).add_rational(&int(1)),
            };
            (lower, upper, None)
        }
        DeltaMode::Numeric => {
            let m_max = finite_m.max(2);
            let table = RowTable::build(alpha, m_max, tail_split, prec)?;
            let lower = Quantity {
                exact: None,
                enclosure: table.zeta().add_rational(&int(-1)).scale(&c.recip()),
            };
            let mut best: Option<(u64, Enclosure)> = None;
            for m in 2..=m_max {
                let d = table.delta_upper(m)?;
                best = match best {
                    Some((bm, b)) if b.midpoint() <= d.midpoint() => {
                        let lo = b.lo().clone().min(d.lo().clone());
                        Some((bm, Enclosure::new(lo, b.hi().clone())?))
                    }
                    Some((_, b)) => {
                        let lo = b.lo().clone().min(d.lo().clone());
                        Some((m, Enclosure::new(lo, d.hi().clone())?))
                    }
                    None => Some((m, d)),
                };
            }
            let (bm, enc) = best.expect("nonempty range");
            (lower, Quantity { exact: None, enclosure: enc }, Some(bm))
        }
    };
    let feasible = if let (Some(l), Some(u)) = (&lower.exact, &upper.exact) {
        Some(l.cmp_value(u) != Ordering::Greater)
    } else if lower.enclosure.certainly_le(&upper.enclosure) {
        Some(true)
    } else if upper.enclosure.certainly_lt(&lower.enclosure) {
        Some(false)
    } else {
        None
    };
    Ok(DeltaInterval {
        mode,
        lower,
        upper,
        binding_m,
        feasible,
    })
}

/// Comparison of a value with a decimal quoted as a truncated expansion,
/// i.e. as a claim that the value lies in `[q, q + 10^{−d})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecimalCheck {
    pub quoted: String,
    pub computed: String,
    pub consistent: bool,
}

pub fn check_quoted_decimal(value: &Enclosure, quoted: &str) -> Result<DecimalCheck> {
    let q = quoted.trim().trim_end_matches(['…', '.']);
    let digits = q.split_once('.').map_or(0, |(_, f)| f.len());
    let lo = crate::numerics::parse_number(q)?;
    let ulp = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), digits));
    let hi = &lo + ulp;
    // half-open window [lo, hi)
    let consistent = value.hi() >= &lo && value.lo() < &hi;
    Ok(DecimalCheck {
        quoted: quoted.to_string(),
        computed: format_decimal(&value.midpoint(), digits + 3, Rounding::Nearest),
        consistent,
    })
}

/// Adaptive margin evaluation: refines the split and precision until the
/// sign is decided or the budget runs out.
pub fn margin_sign(alpha: &Rational, m: u64) -> Result<(Option<Ordering>, Enclosure)> {
    let mut split = 64u64.max(m);
    let mut bits = 64;
    loop {
        let e = criterion_margin(alpha, m, split, &Precision::new(bits))?;
        if e.sign().is_some() || split >= 1 << 16 {
            return Ok((e.sign(), e));
        }
        split *= 4;
        bits += 32;
    }
}

/// Bisection bracket for a sign change.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub bracket: Enclosure,
    pub steps: usize,
}

impl Root {
    pub fn midpoint_f64(&self) -> f64 {
        self.bracket.mid_f64()
    }
}

/// Bisection on the sign of `f`; `f(lo)` and `f(hi)` must be decided and
/// opposite. Midpoints are snapped to short dyadics so exponents stay cheap.
/// An undecidable midpoint ends the search with the current bracket.
pub fn bisect<F>(lo: Rational, hi: Rational, tol: &Rational, mut f: F) -> Result<Root>
where
    F: FnMut(&Rational) -> Result<Option<Ordering>>,
{
    let s_lo = f(&lo)?;
    let s_hi = f(&hi)?;
    let (Some(s_lo), Some(s_hi)) = (s_lo, s_hi) else {
        return Err(Error::Bracket("sign undecided at a bracket endpoint".into()));
    };
    if s_lo == s_hi || s_lo == Ordering::Equal || s_hi == Ordering::Equal {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut steps = 0;
    let mut bits = 8i64;
    while &(&b - &a) > tol {
        let mid = snap_dyadic(&((&a + &b) / int(2)), &a, &b, &mut bits);
        steps += 1;
        match f(&mid)? {
            Some(Ordering::Equal) => {
                return Ok(Root {
                    bracket: Enclosure::point(mid),
                    steps,
                })
            }
            Some(s) if s == s_lo => a = mid,
            Some(_) => b = mid,
            None => break,
        }
    }
    Ok(Root {
        bracket: Enclosure::new(a, b)?,
        steps,
    })
}

/// Rounds `x` to the grid `2^{−bits}`, refining the grid until the result
/// lies strictly inside `(a, b)`.
fn snap_dyadic(x: &Rational, a: &Rational, b: &Rational, bits: &mut i64) -> Rational {
    loop {
        let scale = pow2(*bits);
        let r = (x * &scale).round() / &scale;
        if &r > a && &r < b {
            return r;
        }
        *bits += 1;
    }
}

/// The `α` at which the criterion at row `m` changes sign.
pub fn threshold_alpha(m: u64, bracket: (Rational, Rational), tol: &Rational) -> Result<Root> {
    if m < 2 {
        return Err(domain("criterion rows start at m = 2"));
    }
    bisect(bracket.0, bracket.1, tol, |a| Ok(margin_sign(a, m)?.0))
}

/// `g(α) = αζ(1+α) − 2`, adaptively enclosed.
pub fn alpha0_function(alpha: &Rational) -> Result<Enclosure> {
    let mut split = 64;
    let mut bits = 64;
    loop {
        let z = zeta_upper_enclosure(alpha, split, &pow2(-bits))?;
        let g = z.enclosure.scale(alpha).add_rational(&int(-2));
        if g.sign().is_some() || split >= 1 << 16 {
            return Ok(g);
        }
        split *= 4;
        bits += 32;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alpha0 {
    pub alpha: Enclosure,
    /// Enclosure of `αζ(1+α) − 2` over the whole bracket (by monotonicity,
    /// the hull of its values at the endpoints).
    pub residual: Enclosure,
    pub steps: usize,
}

/// The root of `αζ(1+α) = 2` on `[1, 8/5]`.
pub fn alpha0_solve(tol: &Rational) -> Result<Alpha0> {
    let root = bisect(int(1), rat(8, 5), tol, |a| Ok(alpha0_function(a)?.sign()))?;
    let g_lo = alpha0_function(root.bracket.lo())?;
    let g_hi = alpha0_function(root.bracket.hi())?;
    Ok(Alpha0 {
        residual: g_lo.hull(&g_hi),
        alpha: root.bracket,
        steps: root.steps,
    })
}

/// `k(1) + ∫₁^∞ k = 1 + 1/α`, the bound from comparing each row with the
/// tail integral alone.
pub fn badest_bound(alpha: &Rational) -> Result<Rational> {
    if !alpha.is_positive() {
        return Err(domain(format!("alpha = {alpha} must be positive")));
    }
    Ok(int(1) + alpha.recip())
}

/// Float `ζ(1+α)` helper for diagnostics.
pub fn zeta_f64(alpha: f64) -> f64 {
    1.0 + crate::eulermaclaurin::float_tail(alpha, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_f64, parse_number, to_f64};

    fn p() -> Precision {
        Precision::new(96)
    }

    #[test]
    fn row_sums_match_oracle() {
        let r1 = row_sum(&rat(3, 2), 1, 10_000, &p()).unwrap();
        assert!(r1.row_sum.contains(&parse_number("1.341487257250917179756769693").unwrap()));
        let r2 = row_sum(&rat(3, 2), 2, 10_000, &p()).unwrap();
        assert!((r2.row_sum.mid_f64() - 1.319425211757).abs() < 1e-11);
        let r = row_sum(&int(1), 2000, 10_000, &Precision::new(64)).unwrap();
        assert!((r.row_sum.mid_f64() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn margins_match_oracle() {
        let t = RowTable::build(&rat(3, 2), 64, 10_000, &p()).unwrap();
        for (m, want) in [(2, 0.0049588), (3, 0.01411), (4, 0.02002), (8, 0.03178), (16, 0.04033), (64, 0.05073)] {
            let e = t.margin(m).unwrap();
            assert!(e.is_positive());
            assert!((e.mid_f64() - want).abs() < 5e-5, "m={m}: {}", e.mid_f64());
            assert!(to_f64(&e.width()) < 1e-9);
        }
    }

    #[test]
    fn margin_signs_near_threshold() {
        let e = criterion_margin(&rat(149, 100), 2, 1000, &Precision::new(64)).unwrap();
        assert!((e.mid_f64() - 0.012378).abs() < 1e-5);
        let e = criterion_margin(&rat(151, 100), 2, 1000, &Precision::new(64)).unwrap();
        assert!((e.mid_f64() + 0.0022783).abs() < 1e-6);
        let e = criterion_margin(&rat(8, 5), 2, 1000, &Precision::new(64)).unwrap();
        assert!(e.is_negative());
        assert!(criterion_margin(&int(2), 2, 100, &p()).is_err());
    }

    #[test]
    fn uniform_margin_examples() {
        let u = uniform_margin(&rat(3, 2), &p()).unwrap();
        assert_eq!(u.g.exact.as_ref().unwrap().to_string(), "√2/8 − 133/640");
        assert!((u.g.enclosure.mid_f64() + 0.031036).abs() < 1e-6);
        let want = Surd::from_rational(rat(2693, 1920)).minus(&Surd::sqrt_int(2).scale(&rat(1, 24)));
        assert_eq!(u.induced_bound.exact.unwrap(), want);
        let u1 = uniform_margin(&int(1), &p()).unwrap();
        assert_eq!(u1.g.exact.unwrap(), Surd::from_rational(rat(1, 12) - rat(1, 2)));
        assert!(uniform_margin(&rat(1, 2), &p()).is_err());
    }

    #[test]
    fn uniform_comparison_at_three_halves() {
        let c = uniform_comparison(&rat(3, 2), 4, &Precision::new(128)).unwrap();
        assert!(c.holds);
        assert!(c.zeta_bound.enclosure.certainly_lt(&c.induced_bound.enclosure));
        assert!((c.induced_bound.enclosure.mid_f64() - 1.3436786016).abs() < 1e-9);
    }

    #[test]
    fn em_row_bound_dominates_numeric() {
        let a = rat(3, 2);
        let t = RowTable::build(&a, 32, 5000, &p()).unwrap();
        for m in 2..=32 {
            let em = row_sum_em_bound(&a, m, &p()).unwrap();
            assert!(em.lo() >= t.row(m).unwrap().row_sum.hi(), "m={m}");
        }
    }

    #[test]
    fn certify_examples() {
        let c = certify(&rat(3, 2), &CertifyOptions::default()).unwrap();
        assert_eq!(c.status, Status::Certified);
        assert_eq!(c.constant.as_deref(), Some("4/3"));
        assert!(c.uniform_bound);
        let c = certify(&int(1), &CertifyOptions::default()).unwrap();
        assert_eq!(c.status, Status::Certified);
        assert_eq!(c.constant.as_deref(), Some("2"));
        let opts = CertifyOptions {
            finite_m: 8,
            tail_split: 2000,
            precision: Precision::new(64),
            ..CertifyOptions::default()
        };
        let c = certify(&rat(8, 5), &opts).unwrap();
        assert_eq!(c.status, Status::Falsified);
        assert!(c.constant.is_none());
        let c = certify(&rat(1, 2), &opts).unwrap();
        assert_eq!(c.status, Status::Certified);
        assert_eq!(c.constant.as_deref(), Some("4"));
    }

    #[test]
    fn certificate_round_trip() {
        let opts = CertifyOptions {
            finite_m: 6,
            tail_split: 1000,
            precision: Precision::new(64),
            ..CertifyOptions::default()
        };
        let c = certify(&rat(3, 2), &opts).unwrap();
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let r = back.recheck(&Precision::new(64)).unwrap();
        assert!(r.matches);
    }

    #[test]
    fn delta_interval_modes() {
        let d = delta_interval(&rat(3, 2), DeltaMode::EmCertified, 64, 10_000, &p()).unwrap();
        let z = Surd::sqrt_int(2)
            .scale(&rat(1, 8))
            .plus(&Surd::sqrt_int(3).scale(&rat(1, 27)))
            .plus(&Surd::from_rational(rat(103, 1024)));
        assert_eq!(d.lower.exact.clone().unwrap(), z.scale(&int(3)));
        let up = Surd::from_rational(rat(773, 640)).minus(&Surd::sqrt_int(2).scale(&rat(1, 8)));
        assert_eq!(d.upper.exact.clone().unwrap(), up);
        assert_eq!(d.feasible, Some(true));
        assert!((d.lower.enclosure.mid_f64() - 1.024537988).abs() < 1e-9);
        assert!((d.upper.enclosure.mid_f64() - 1.031035805).abs() < 1e-9);

        let n = delta_interval(&rat(3, 2), DeltaMode::Numeric, 64, 10_000, &p()).unwrap();
        assert_eq!(n.binding_m, Some(2));
        assert!((n.lower.enclosure.mid_f64() - 1.02446177).abs() < 1e-8);
        assert!((n.upper.enclosure.mid_f64() - 1.03933811).abs() < 1e-8);

        let f = delta_interval(&rat(8, 5), DeltaMode::Numeric, 16, 2000, &Precision::new(64)).unwrap();
        assert_eq!(f.feasible, Some(false));
        let f = delta_interval(&rat(8, 5), DeltaMode::EmCertified, 16, 2000, &Precision::new(64)).unwrap();
        assert_eq!(f.feasible, Some(false));
    }

    #[test]
    fn quoted_decimals() {
        let d = delta_interval(&rat(3, 2), DeltaMode::EmCertified, 64, 10_000, &p()).unwrap();
        assert!(check_quoted_decimal(&d.lower.enclosure, "1.0245").unwrap().consistent);
        assert!(!check_quoted_decimal(&d.upper.enclosure, "1.0315…").unwrap().consistent);
        assert!(check_quoted_decimal(&d.upper.enclosure, "1.0310").unwrap().consistent);
    }

    #[test]
    fn bisection_rejects_bad_brackets() {
        let err = threshold_alpha(2, (rat(7, 5), rat(29, 20)), &rat(1, 1000)).unwrap_err();
        assert!(matches!(err, Error::Bracket(_)));
    }

    #[test]
    fn badest_examples() {
        assert_eq!(badest_bound(&int(1)).unwrap(), int(2));
        assert_eq!(badest_bound(&rat(3, 2)).unwrap(), rat(5, 3));
        assert_eq!(badest_bound(&rat(1, 2)).unwrap(), int(3));
    }

    #[test]
    fn weight_ratio_is_below_constant() {
        let w = SchurWeight::new(rat(3, 2), rat(103, 100)).unwrap();
        for m in 1..=20 {
            assert!(w.ratio_f64(m, 200_000) <= 4.0 / 3.0, "m={m}");
        }
        assert!(SchurWeight::new(rat(3, 2), int(0)).is_err());
        assert!(from_f64(w.weight_f64(4)).unwrap() == rat(1, 2));
    }
}
