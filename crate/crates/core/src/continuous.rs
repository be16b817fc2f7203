//! The continuous constant `B(K) = ∫₀^∞ k(y) dy`, test-function ratios, the
//! Poisson-kernel integral representation of the max-family form, and
//! Riemann-sum comparisons of the profile.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::{Alpha, Kernel, KernelFamily};
use crate::numerics::{from_f64, int, pi_enclosure, Enclosure, KahanSum, Rational};
use crate::quadform::{quadform_naive, CoefficientSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMethod {
    ClosedForm,
    /// Float quadrature; the enclosure is an estimate, not a certificate.
    Quadrature,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousConstant {
    pub kernel: String,
    pub b: Enclosure,
    pub method: ConstantMethod,
}

/// `B(K)`: exactly `2/α` for the max family, `π` for the Hilbert kernel.
pub fn continuous_constant(kernel: &Kernel, width_cap: &Rational) -> Result<ContinuousConstant> {
    let (b, method) = match kernel.family() {
        KernelFamily::MaxFamily(Alpha::Exact(a)) => {
            (Enclosure::point(int(2) / a), ConstantMethod::ClosedForm)
        }
        KernelFamily::MaxFamily(Alpha::Approx(a)) => {
            (Enclosure::point(int(2) / from_f64(*a)?), ConstantMethod::ClosedForm)
        }
        KernelFamily::Hilbert => (pi_enclosure(width_cap)?, ConstantMethod::ClosedForm),
        KernelFamily::Custom(_) => {
            let profile = kernel.profile();
            let (v, err) = profile_integral(|y| profile.eval_f64(y), -80.0);
            let lo = from_f64(v - err)?;
            let hi = from_f64(v + err)?;
            (Enclosure::new(lo, hi)?, ConstantMethod::Quadrature)
        }
    };
    Ok(ContinuousConstant {
        kernel: kernel.description().to_string(),
        b,
        method,
    })
}

/// Simpson's rule with `panels` (even) panels.
fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = KahanSum::new();
    acc.add(f(a) + f(b));
    for i in 1..panels {
        acc.add(if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

/// `∫ k(y) dy` over `y ∈ [e^{lo}, e^{80}]` after `y = e^u`; returns the value
/// and the change under panel doubling as an error estimate.
fn profile_integral(k: impl Fn(f64) -> f64, lo: f64) -> (f64, f64) {
    let g = |u: f64| {
        let y = u.exp();
        k(y) * y
    };
    let coarse = simpson(&g, lo, 80.0, 1 << 14);
    let fine = simpson(&g, lo, 80.0, 1 << 15);
    (fine, (fine - coarse).abs().max(1e-15))
}

/// The Rayleigh ratio of `f_ε(x) = x^{−1/2−ε}` on `[1, ∞)`:
/// `2∫₁^∞ k(y) y^{−ε} dy`, which is `2/(α+ε)` for the max family.
pub fn test_function_ratio(kernel: &Kernel, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    match kernel.family() {
        KernelFamily::MaxFamily(a) => Ok(2.0 / (a.as_f64() + epsilon)),
        KernelFamily::Hilbert => {
            // 2∫₀^∞ e^{(1/2−ε)u}/(1+e^u) du; the tail past U is below
            // 2e^{−(1/2+ε)U}/(1/2+ε)
            let decay = 0.5 + epsilon;
            let u_max = (40.0 / decay).max(10.0);
            let g = |u: f64| 2.0 * ((0.5 - epsilon) * u).exp() / (1.0 + u.exp());
            Ok(simpson(&g, 0.0, u_max, 1 << 16))
        }
        KernelFamily::Custom(_) => {
            let p = kernel.profile();
            Ok(2.0 * profile_integral(|y| p.eval_f64(y) * y.powf(-epsilon), 0.0).0)
        }
    }
}

/// Exact form of the max-family ratio, `2/(α+ε)`.
pub fn test_function_ratio_exact(alpha: &Rational, epsilon: &Rational) -> Rational {
    int(2) / (alpha + epsilon)
}

/// Controls for [`integral_representation_check`]; `None` fields are chosen
/// from the error bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntrepOptions {
    pub t_max: Option<f64>,
    pub step: Option<f64>,
    /// Target for the off-diagonal truncation bound.
    pub tol: f64,
}

impl Default for IntrepOptions {
    fn default() -> Self {
        IntrepOptions {
            t_max: None,
            step: None,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntrepReport {
    pub alpha: f64,
    /// `α·Σ a_m conj(a_n) K_α(m, n)`.
    pub lhs: f64,
    /// Quadrature on `[−T, T]` plus the exact diagonal tail.
    pub rhs: f64,
    pub quadrature: f64,
    pub diagonal_tail: f64,
    /// Bound on the off-diagonal part of the tail beyond `|t| = T`.
    pub tail_bound: f64,
    pub t_max: f64,
    pub steps: usize,
    pub discrepancy: f64,
}

/// `Σ_{m<n} 2|a_m a_n|(mn)^{−1/2}/ln(n/m)`, the off-diagonal weight of the
/// tail bound.
fn offdiag_weight(a: &CoefficientSequence) -> f64 {
    let e = a.entries();
    let mut acc = KahanSum::new();
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let (m, n) = ((i + 1) as f64, (j + 1) as f64);
            acc.add(2.0 * e[i].norm() * e[j].norm() / (m * n).sqrt() / (n / m).ln());
        }
    }
    acc.value()
}

/// Midpoint rule for `(1/π)∫_{−T}^{T} |Σ a_m m^{−1/2−it}|² α²/(α²+t²) dt`.
///
/// The factors `m^{−it}` are advanced by a fixed rotation per step and
/// recomputed from `cos`/`sin` every 256 steps.
pub fn midpoint_quadrature(alpha: f64, a: &CoefficientSequence, t_max: f64, steps: usize) -> f64 {
    let h = t_max / steps as f64;
    let logs: Vec<f64> = (1..=a.len()).map(|m| (m as f64).ln()).collect();
    let coef: Vec<Complex64> = a
        .entries()
        .iter()
        .enumerate()
        .map(|(i, z)| z / ((i + 1) as f64).sqrt())
        .collect();
    let rot: Vec<Complex64> = logs.iter().map(|l| Complex64::from_polar(1.0, -h * l)).collect();
    let mut phase: Vec<Complex64> = Vec::new();
    let a2 = alpha * alpha;
    let mut acc = KahanSum::new();
    for j in 0..steps {
        let t = (j as f64 + 0.5) * h;
        if j % 256 == 0 {
            phase = logs.iter().map(|l| Complex64::from_polar(1.0, -t * l)).collect();
        } else {
            for (p, r) in phase.iter_mut().zip(&rot) {
                *p *= r;
            }
        }
        let d: Complex64 = coef.iter().zip(&phase).map(|(c, p)| c * p).sum();
        acc.add(d.norm_sqr() * a2 / (a2 + t * t));
    }
    // even integrand: twice the half-line
    2.0 * h * acc.value() / PI
}

/// Compares `α·Σ a_m conj(a_n) K_α(m, n)` with its Poisson-kernel integral
/// representation `(1/π)∫ |Σ a_m m^{−1/2−it}|² α²/(α²+t²) dt`.
///
/// Beyond `|t| = T` the diagonal terms integrate exactly to
/// `Σ|a_m|²/m · (2α/π)·atan(α/T)`; each off-diagonal pair contributes at most
/// `2|a_m a_n|(mn)^{−1/2} · 4g(T)/ln(n/m)` with `g(T) = α²/(π(α²+T²))`.
pub fn integral_representation_check(
    alpha: f64,
    a: &CoefficientSequence,
    opts: &IntrepOptions,
) -> Result<IntrepReport> {
    if !(alpha > 0.0) {
        return Err(domain("alpha must be positive"));
    }
    if !(opts.tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let w = offdiag_weight(a);
    let t_max = opts.t_max.unwrap_or_else(|| {
        // 4w·α²/(πT²) ≤ tol
        (4.0 * w * alpha * alpha / (PI * opts.tol)).sqrt().max(50.0)
    });
    if !(t_max > 0.0) {
        return Err(domain("T must be positive"));
    }
    let h = opts.step.unwrap_or_else(|| (alpha / 10.0).min(0.05));
    let steps = (t_max / h).ceil() as usize;
    if steps == 0 || steps > 1 << 28 {
        return Err(Error::Domain(format!("{steps} quadrature steps is out of range")));
    }
    let kernel = Kernel::max_family_f64(alpha)?;
    let lhs = alpha * quadform_naive(&kernel, a);
    let quadrature = midpoint_quadrature(alpha, a, t_max, steps);
    let diag: f64 = a
        .entries()
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm_sqr() / (i + 1) as f64)
        .collect::<KahanSum>()
        .value();
    let diagonal_tail = diag * 2.0 * alpha / PI * (alpha / t_max).atan();
    let g = alpha * alpha / (PI * (alpha * alpha + t_max * t_max));
    let tail_bound = 4.0 * g * w;
    let rhs = quadrature + diagonal_tail;
    Ok(IntrepReport {
        alpha,
        lhs,
        rhs,
        quadrature,
        diagonal_tail,
        tail_bound,
        t_max,
        steps,
        discrepancy: (lhs - rhs).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiemannRow {
    pub y_left: f64,
    pub y_right: f64,
    pub rect_height: f64,
    /// Exact integral of the integrand over the cell.
    pub integrand: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiemannReport {
    pub alpha: f64,
    pub m: u64,
    pub epsilon: f64,
    pub rule: Rule,
    pub window: (f64, f64),
    pub rows: Vec<RiemannRow>,
    /// Bounds on the Riemann sum over the window; they coincide for finite
    /// windows and bracket the unsummed tail otherwise.
    pub sum_bounds: (f64, f64),
    pub integral: f64,
}

impl RiemannReport {
    /// Riemann sum certainly exceeds the integral.
    pub fn overestimates(&self) -> bool {
        self.sum_bounds.0 >= self.integral
    }

    /// Riemann sum certainly stays below the integral.
    pub fn underestimates(&self) -> bool {
        self.sum_bounds.1 <= self.integral
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("y_left,y_right,rect_height,integrand\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.y_left, r.y_right, r.rect_height, r.integrand);
        }
        out
    }
}

/// `f(y) = y^{−ε} k_α(y)`: `y^{α−1−ε}` on `(0, 1]`, `y^{−α−1−ε}` beyond.
fn riemann_exponent(alpha: f64, eps: f64, y_mid: f64) -> f64 {
    if y_mid <= 1.0 {
        alpha - 1.0 - eps
    } else {
        -alpha - 1.0 - eps
    }
}

fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if (p + 1.0).abs() < 1e-15 {
        (b / a).ln()
    } else {
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

/// Left or right Riemann sums of `y^{−ε} k_α(y)` with cells of width `1/m` on
/// `[lo, hi]` (`hi` may be infinite), next to the exact integral.
///
/// Windows are snapped outward to the grid `Z/m`. For an infinite window the
/// rows stop at `y = max(lo, 1) + 64`; the remaining sum is bracketed by the
/// tail integral and one extra cell, since the integrand decreases there.
pub fn riemann_sum_comparison(
    alpha: f64,
    m: u64,
    epsilon: f64,
    window: (f64, f64),
    rule: Rule,
) -> Result<RiemannReport> {
    if m == 0 || !(alpha > 0.0) || !(epsilon >= 0.0) {
        return Err(domain("need m ≥ 1, alpha > 0, epsilon ≥ 0"));
    }
    let (lo, hi) = window;
    if !(lo >= 0.0 && hi > lo) {
        return Err(domain("window must satisfy 0 ≤ lo < hi"));
    }
    let mf = m as f64;
    let infinite = hi.is_infinite();
    let cut = if infinite { lo.max(1.0) + 64.0 } else { hi };
    let j0 = (lo * mf).floor() as u64;
    let j1 = (cut * mf).ceil() as u64;
    if j1 - j0 > 10_000_000 {
        return Err(domain("too many cells"));
    }
    let f = |y: f64| y.powf(riemann_exponent(alpha, epsilon, y));
    let mut rows = Vec::new();
    let mut sum = KahanSum::new();
    let mut integral = KahanSum::new();
    for j in j0..j1 {
        let (a, b) = (j as f64 / mf, (j + 1) as f64 / mf);
        let height = match rule {
            Rule::Left => f(a),
            Rule::Right => f(b),
        };
        let cell = power_integral(riemann_exponent(alpha, epsilon, (a + b) / 2.0), a, b);
        sum.add(height / mf);
        integral.add(cell);
        rows.push(RiemannRow {
            y_left: a,
            y_right: b,
            rect_height: height,
            integrand: cell,
        });
    }
    let mut bounds = (sum.value(), sum.value());
    if infinite {
        let y = j1 as f64 / mf;
        let s = alpha + epsilon;
        let tail = y.powf(-s) / s;
        integral.add(tail);
        let edge = f(y) / mf;
        bounds = match rule {
            Rule::Right => (bounds.0 + tail - edge, bounds.1 + tail),
            Rule::Left => (bounds.0 + tail, bounds.1 + tail + edge),
        };
    }
    Ok(RiemannReport {
        alpha,
        m,
        epsilon,
        rule,
        window: (j0 as f64 / mf, if infinite { f64::INFINITY } else { j1 as f64 / mf }),
        rows,
        sum_bounds: bounds,
        integral: integral.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{pow2, rat};

    #[test]
    fn closed_form_constants() {
        for (a, want) in [(rat(3, 2), rat(4, 3)), (int(1), int(2)), (rat(1, 2), int(4))] {
            let c = continuous_constant(&Kernel::max_family(a).unwrap(), &pow2(-64)).unwrap();
            assert!(c.b.is_point());
            assert_eq!(c.b.lo(), &want);
            assert_eq!(c.method, ConstantMethod::ClosedForm);
        }
        let h = continuous_constant(&Kernel::hilbert(), &pow2(-40)).unwrap();
        assert!(h.b.contains(&from_f64(PI).unwrap()));
        assert!(crate::numerics::to_f64(&h.b.width()) < 1e-9);
    }

    #[test]
    fn custom_kernel_uses_quadrature() {
        let c = continuous_constant(&Kernel::custom("h", |x, y| 1.0 / (x + y)), &pow2(-40)).unwrap();
        assert_eq!(c.method, ConstantMethod::Quadrature);
        assert!((c.b.mid_f64() - PI).abs() < 1e-8);
    }

    #[test]
    fn test_ratios() {
        let k = Kernel::max_family(rat(3, 2)).unwrap();
        assert_eq!(test_function_ratio(&k, 0.5).unwrap(), 1.0);
        assert_eq!(test_function_ratio_exact(&rat(3, 2), &rat(1, 2)), int(1));
        let mut last = 0.0;
        for eps in [1.0, 0.5, 0.1, 0.01, 0.001] {
            let r = test_function_ratio(&k, eps).unwrap();
            assert!(r > last && r < 4.0 / 3.0);
            last = r;
        }
        // scipy oracle: 2∫₁^∞ y^{−0.6}/(1+y) dy
        let h = test_function_ratio(&Kernel::hilbert(), 0.1).unwrap();
        assert!(h < PI && (h - 2.537515655494).abs() < 1e-10, "{h}");
        let h2 = test_function_ratio(&Kernel::hilbert(), 0.01).unwrap();
        assert!(h2 < PI && (h2 - 3.069834698673).abs() < 1e-10, "{h2}");
        let c = test_function_ratio(&Kernel::custom("h", |x, y| 1.0 / (x + y)), 0.1).unwrap();
        assert!((c - h).abs() < 1e-7, "{c} vs {h}");
        assert!(test_function_ratio(&k, 0.0).is_err());
    }

    #[test]
    fn intrep_single_term_is_poisson_mass() {
        let a = CoefficientSequence::from_real(vec![1.0]).unwrap();
        for alpha in [0.5, 1.0, 1.5] {
            let r = integral_representation_check(alpha, &a, &IntrepOptions::default()).unwrap();
            assert!((r.lhs - alpha).abs() < 1e-15);
            assert!(r.discrepancy < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn intrep_two_terms() {
        let a = CoefficientSequence::from_real(vec![1.0, 1.0]).unwrap();
        let r = integral_representation_check(1.5, &a, &IntrepOptions::default()).unwrap();
        assert!((r.lhs - 3.0).abs() < 1e-14);
        assert!(r.discrepancy < 1e-6, "{r:?}");
        assert!(r.discrepancy <= r.tail_bound + 1e-9);
    }

    #[test]
    fn midpoint_error_scales_quadratically_on_a_window() {
        let a = CoefficientSequence::from_real(vec![1.0, -0.5, 0.25]).unwrap();
        let reference = midpoint_quadrature(1.0, &a, 5.0, 1 << 16);
        let e1 = (midpoint_quadrature(1.0, &a, 5.0, 100) - reference).abs();
        let e2 = (midpoint_quadrature(1.0, &a, 5.0, 200) - reference).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn riemann_examples() {
        let r = riemann_sum_comparison(0.5, 2, 0.25, (1.0, 5.0), Rule::Left).unwrap();
        assert!(r.overestimates());
        assert_eq!(r.rows.len(), 8);
        let r = riemann_sum_comparison(1.0, 2, 0.0, (0.0, f64::INFINITY), Rule::Right).unwrap();
        assert!((r.integral - 2.0).abs() < 1e-12);
        assert!(r.underestimates());
        let r = riemann_sum_comparison(1.5, 3, 0.0, (0.0, 1.0), Rule::Right).unwrap();
        assert!(r.overestimates());
        let csv = r.to_csv();
        assert!(csv.starts_with("y_left,y_right,rect_height,integrand\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
