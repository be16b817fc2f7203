//! Homogeneous kernels of degree −1 and their profiles.
//!
//! Kernels are closed descriptors so that exactness and homogeneity can be
//! guaranteed per family. [`Kernel::custom`] is an escape hatch for float
//! exploration only; it never reaches certificate-grade code paths.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::numerics::{
    exact_sqrt, parse_fraction, powi, pow_enclosure, sqrt_enclosure, to_f64, Enclosure,
    Precision, Rational,
};

/// The parameter `α` of the max family: exact when it came from a fraction,
/// approximate when it came from a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    Exact(Rational),
    Approx(f64),
}

impl Alpha {
    pub fn as_f64(&self) -> f64 {
        match self {
            Alpha::Exact(r) => to_f64(r),
            Alpha::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Alpha::Exact(r) => Some(r),
            Alpha::Approx(_) => None,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Exact(r) => write!(f, "{r}"),
            Alpha::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// A user-supplied kernel, evaluated in floating point only.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub eval: fn(f64, f64) -> f64,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum KernelFamily {
    /// `K_α(x, y) = (xy)^{α−1/2} / max(x, y)^{2α}`
    MaxFamily(Alpha),
    /// `K(x, y) = 1/(x + y)`
    Hilbert,
    Custom(CustomKernel),
}

#[derive(Clone, Debug)]
pub struct Kernel {
    family: KernelFamily,
    description: String,
}

/// How a kernel value is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalMode {
    /// Exact rational; fails with a mode error if the value is irrational.
    Exact,
    Enclosure(Precision),
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Enclosed(Enclosure),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Enclosed(e) => e.mid_f64(),
            Value::Float(x) => *x,
        }
    }

    /// The value as an enclosure; `None` for float values.
    pub fn enclosure(&self) -> Option<Enclosure> {
        match self {
            Value::Exact(r) => Some(Enclosure::point(r.clone())),
            Value::Enclosed(e) => Some(e.clone()),
            Value::Float(_) => None,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            _ => None,
        }
    }
}

/// Exact `base^e` when it is rational.
pub fn exact_pow(base: &Rational, e: &Rational) -> Option<Rational> {
    if e.is_integer() {
        return Some(powi(base, e.to_integer().to_i64()?));
    }
    if !base.is_positive() {
        return None;
    }
    let q = e.denom().to_u32()?;
    let p = e.numer().to_i64()?;
    // keep exact roots cheap; big exponents would be huge integers
    if p.unsigned_abs() > 4096 {
        return None;
    }
    exact_root(&powi(base, p), q)
}

/// Exact `q`-th root of a positive rational if it is rational.
pub fn exact_root(r: &Rational, q: u32) -> Option<Rational> {
    let a = r.numer().nth_root(q);
    let b = r.denom().nth_root(q);
    (num_traits::pow(a.clone(), q as usize) == *r.numer()
        && num_traits::pow(b.clone(), q as usize) == *r.denom())
    .then(|| Rational::new(a, b))
}

fn check_positive(x: &Rational, name: &str) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} must be positive")))
    }
}

impl Kernel {
    pub fn max_family(alpha: Rational) -> Result<Self> {
        check_positive(&alpha, "alpha")?;
        Ok(Kernel {
            description: format!("max-family:{alpha}"),
            family: KernelFamily::MaxFamily(Alpha::Exact(alpha)),
        })
    }

    /// Max family with a float parameter; float and enclosure-free paths only.
    pub fn max_family_f64(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("alpha = {alpha} must be positive")));
        }
        Ok(Kernel {
            description: format!("max-family:{alpha}"),
            family: KernelFamily::MaxFamily(Alpha::Approx(alpha)),
        })
    }

    pub fn hilbert() -> Self {
        Kernel {
            description: "hilbert".into(),
            family: KernelFamily::Hilbert,
        }
    }

    pub fn custom(name: &str, eval: fn(f64, f64) -> f64) -> Self {
        Kernel {
            description: format!("custom:{name}"),
            family: KernelFamily::Custom(CustomKernel {
                name: name.into(),
                eval,
            }),
        }
    }

    /// Parses `max-family:<p/q>` or `hilbert`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "hilbert" {
            return Ok(Kernel::hilbert());
        }
        match spec.strip_prefix("max-family:") {
            Some(alpha) => Kernel::max_family(parse_fraction(alpha)?),
            None => Err(Error::Parse(format!(
                "unknown kernel `{spec}` (expected `max-family:<p/q>` or `hilbert`)"
            ))),
        }
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn alpha(&self) -> Option<&Alpha> {
        match &self.family {
            KernelFamily::MaxFamily(a) => Some(a),
            _ => None,
        }
    }

    /// Closed-family kernels with exact parameters may feed certificates.
    pub fn is_certifiable(&self) -> bool {
        match &self.family {
            KernelFamily::MaxFamily(a) => a.exact().is_some(),
            KernelFamily::Hilbert => true,
            KernelFamily::Custom(_) => false,
        }
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        match &self.family {
            KernelFamily::MaxFamily(a) => {
                let a = a.as_f64();
                (x * y).powf(a - 0.5) / x.max(y).powf(2.0 * a)
            }
            KernelFamily::Hilbert => 1.0 / (x + y),
            KernelFamily::Custom(c) => (c.eval)(x, y),
        }
    }

    /// `K(x, y)` in the requested mode.
    pub fn eval(&self, x: &Rational, y: &Rational, mode: &EvalMode) -> Result<Value> {
        check_positive(x, "x")?;
        check_positive(y, "y")?;
        if let EvalMode::Float = mode {
            return Ok(Value::Float(self.eval_f64(to_f64(x), to_f64(y))));
        }
        match &self.family {
            KernelFamily::Hilbert => Ok(Value::Exact((x + y).recip())),
            KernelFamily::Custom(c) => Err(Error::Mode(format!(
                "custom kernel `{}` is float-only",
                c.name
            ))),
            KernelFamily::MaxFamily(Alpha::Approx(a)) => Err(Error::Mode(format!(
                "alpha = {a} is not exact; use float mode"
            ))),
            KernelFamily::MaxFamily(Alpha::Exact(alpha)) => {
                let exact = max_kernel_exact(alpha, x, y);
                match (mode, exact) {
                    (_, Some(v)) => Ok(Value::Exact(v)),
                    (EvalMode::Exact, None) => Err(Error::Mode(format!(
                        "K_{alpha}({x}, {y}) is irrational; use enclosure mode"
                    ))),
                    (EvalMode::Enclosure(prec), None) => {
                        Ok(Value::Enclosed(max_kernel_enclosure(alpha, x, y, prec)?))
                    }
                    (EvalMode::Float, None) => unreachable!("float handled above"),
                }
            }
        }
    }

    pub fn profile(&self) -> Profile {
        Profile {
            kernel: self.clone(),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// `K_α(x, y)` exactly, when rational: raise to the common denominator `q`
/// of `α − 1/2` and `2α`, then test for an exact `q`-th root.
fn max_kernel_exact(alpha: &Rational, x: &Rational, y: &Rational) -> Option<Rational> {
    let half = Rational::new(1.into(), 2.into());
    let e1 = alpha - &half;
    let e2 = alpha * Rational::from_integer(2.into());
    let m = x.max(y);
    let q = e1.denom().lcm(e2.denom());
    let p1 = (&e1 * Rational::from_integer(q.clone())).to_integer().to_i64()?;
    let p2 = (&e2 * Rational::from_integer(q.clone())).to_integer().to_i64()?;
    if p1.unsigned_abs() + p2.unsigned_abs() > 4096 {
        return None;
    }
    let raised = powi(&(x * y), p1) / powi(m, p2);
    exact_root(&raised, q.to_u32()?)
}

fn max_kernel_enclosure(
    alpha: &Rational,
    x: &Rational,
    y: &Rational,
    prec: &Precision,
) -> Result<Enclosure> {
    let half = Rational::new(1.into(), 2.into());
    let m = x.max(y);
    let mut inner = prec.finer(8);
    loop {
        let a = pow_enclosure(&(x * y), &(alpha - &half), &inner.width_cap())?;
        let b = pow_enclosure(m, &-(alpha * Rational::from_integer(2.into())), &inner.width_cap())?;
        let v = &a * &b;
        if v.width() <= prec.width_cap() {
            return Ok(v);
        }
        inner = inner.finer(16);
    }
}

pub fn eval_kernel(kernel: &Kernel, x: &Rational, y: &Rational, mode: &EvalMode) -> Result<Value> {
    kernel.eval(x, y, mode)
}

/// The profile `k(y) = K(1, y)/√y` of a kernel.
#[derive(Clone, Debug)]
pub struct Profile {
    kernel: Kernel,
}

impl Profile {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        match &self.kernel.family {
            KernelFamily::MaxFamily(a) => {
                let a = a.as_f64();
                if y <= 1.0 {
                    y.powf(a - 1.0)
                } else {
                    y.powf(-a - 1.0)
                }
            }
            _ => self.kernel.eval_f64(1.0, y) / y.sqrt(),
        }
    }

    pub fn eval(&self, y: &Rational, mode: &EvalMode) -> Result<Value> {
        check_positive(y, "y")?;
        if let EvalMode::Float = mode {
            return Ok(Value::Float(self.eval_f64(to_f64(y))));
        }
        match &self.kernel.family {
            KernelFamily::MaxFamily(Alpha::Exact(alpha)) => {
                let e = if y <= &Rational::one() {
                    alpha - Rational::one()
                } else {
                    -(alpha + Rational::one())
                };
                match (exact_pow(y, &e), mode) {
                    (Some(v), _) => Ok(Value::Exact(v)),
                    (None, EvalMode::Exact) => Err(Error::Mode(format!(
                        "k({y}) is irrational; use enclosure mode"
                    ))),
                    (None, EvalMode::Enclosure(prec)) => {
                        Ok(Value::Enclosed(pow_enclosure(y, &e, &prec.width_cap())?))
                    }
                    (None, EvalMode::Float) => unreachable!("float handled above"),
                }
            }
            KernelFamily::Hilbert => {
                let base = (Rational::one() + y).recip();
                match (exact_sqrt(y), mode) {
                    (Some(r), _) => Ok(Value::Exact(base / r)),
                    (None, EvalMode::Exact) => Err(Error::Mode(format!(
                        "k({y}) is irrational; use enclosure mode"
                    ))),
                    (None, EvalMode::Enclosure(prec)) => {
                        let inner = prec.finer(4).width_cap();
                        let root = sqrt_enclosure(y, &inner)?;
                        Ok(Value::Enclosed(root.recip()?.scale(&base)))
                    }
                    (None, EvalMode::Float) => unreachable!("float handled above"),
                }
            }
            _ => Err(Error::Mode(format!(
                "profile of `{}` is float-only",
                self.kernel.description
            ))),
        }
    }
}

pub fn eval_profile(profile: &Profile, y: &Rational, mode: &EvalMode) -> Result<Value> {
    profile.eval(y, mode)
}

/// One homogeneity probe `(x, y, λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneitySample {
    pub x: Rational,
    pub y: Rational,
    pub lambda: Rational,
}

impl HomogeneitySample {
    pub fn new(x: Rational, y: Rational, lambda: Rational) -> Self {
        HomogeneitySample { x, y, lambda }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityReport {
    /// Upper bounds on `|λ·K(λx, λy) − K(x, y)|`, one per sample.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `K(λx, λy) = λ⁻¹K(x, y)` on each sample. Exact mode demands a zero
/// residual; enclosure mode demands that `λ·K(λx, λy)` and `K(x, y)` overlap
/// and reports the widest difference enclosure as the tolerance; float mode
/// allows `10⁻¹²` relative to `max(1, |K(x, y)|)`.
pub fn check_homogeneity(
    kernel: &Kernel,
    samples: &[HomogeneitySample],
    mode: &EvalMode,
) -> Result<HomogeneityReport> {
    let mut residuals = Vec::with_capacity(samples.len());
    let mut passed = true;
    let mut tolerance = match mode {
        EvalMode::Float => 1e-12,
        _ => 0.0,
    };
    for s in samples {
        check_positive(&s.lambda, "lambda")?;
        let base = kernel.eval(&s.x, &s.y, mode)?;
        let scaled = kernel.eval(&(&s.lambda * &s.x), &(&s.lambda * &s.y), mode)?;
        let (residual, ok) = match (base, scaled) {
            (Value::Float(b), Value::Float(v)) => {
                let r = (to_f64(&s.lambda) * v - b).abs();
                (r, r <= tolerance * b.abs().max(1.0))
            }
            (b, v) => {
                let b = b.enclosure().expect("non-float value");
                let v = v.enclosure().expect("non-float value");
                let diff = v.scale(&s.lambda) - b;
                tolerance = tolerance.max(to_f64(&diff.width()));
                (to_f64(&diff.magnitude()), diff.contains(&Rational::zero()))
            }
        };
        passed &= ok;
        residuals.push(residual);
    }
    Ok(HomogeneityReport {
        residuals,
        tolerance,
        passed,
    })
}

/// Which monotonicity hypotheses the profile satisfies: decreasing on
/// `(1, ∞)` gives the lower bound `C ≥ ∫k`; decreasing on all of `(0, ∞)`
/// gives the matching upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Monotonicity {
    pub decreasing_beyond_one: bool,
    pub decreasing_everywhere: bool,
}

/// Analytic monotonicity facts for the closed families; `None` for custom
/// kernels.
pub fn profile_monotonicity(kernel: &Kernel) -> Option<Monotonicity> {
    match &kernel.family {
        KernelFamily::MaxFamily(a) => Some(Monotonicity {
            decreasing_beyond_one: true,
            // y^{α−1} is nonincreasing on (0, 1] iff α ≤ 1
            decreasing_everywhere: a.as_f64() <= 1.0
                && a.exact().map_or(true, |r| r <= &Rational::one()),
        }),
        KernelFamily::Hilbert => Some(Monotonicity {
            decreasing_beyond_one: true,
            decreasing_everywhere: true,
        }),
        KernelFamily::Custom(_) => None,
    }
}
