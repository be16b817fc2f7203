//! Quadratic forms `Σ a_m conj(a_n) K(m, n)` on finite sequences, a linear-time
//! evaluator for the max family, and spectral lower bounds.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::kernels::{EvalMode, Kernel, KernelFamily};
use crate::numerics::{int, parse_number, to_f64, KahanSum, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence {
    entries: Vec<Complex64>,
    exact: Option<Vec<Rational>>,
}

impl CoefficientSequence {
    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::from_complex(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_complex(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("coefficient sequence must be nonempty"));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(domain("coefficients must be finite"));
        }
        Ok(CoefficientSequence {
            entries,
            exact: None,
        })
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        let mut seq = Self::from_real(values.iter().map(to_f64).collect())?;
        seq.exact = Some(values);
        Ok(seq)
    }

    /// Parses one coefficient per line: a real literal (`0.25`, `1/3`), or a
    /// real and imaginary part separated by whitespace. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut exact = Vec::new();
        let mut entries = Vec::new();
        let mut all_real = true;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                parse_number(s).map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", i + 1)))
            };
            match parts.as_slice() {
                [re] => {
                    let r = num(re)?;
                    entries.push(Complex64::new(to_f64(&r), 0.0));
                    exact.push(r);
                }
                [re, im] => {
                    all_real = false;
                    entries.push(Complex64::new(to_f64(&num(re)?), to_f64(&num(im)?)));
                }
                _ => return Err(Error::Parse(format!("line {}: expected 1 or 2 numbers", i + 1))),
            }
        }
        if all_real {
            Self::from_rationals(exact)
        } else {
            Self::from_complex(entries)
        }
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).collect::<KahanSum>().value()
    }

    pub fn norm_sq_exact(&self) -> Option<Rational> {
        self.exact
            .as_ref()
            .map(|v| v.iter().fold(int(0), |acc, x| acc + x * x))
    }
}

/// `Σ_{m,n ≤ N} a_m conj(a_n) K(m, n)` by direct double summation.
pub fn quadform_naive(kernel: &Kernel, a: &CoefficientSequence) -> f64 {
    let n = a.len();
    let e = a.entries();
    let mut acc = KahanSum::new();
    for i in 0..n {
        acc.add(e[i].norm_sqr() * kernel.eval_f64((i + 1) as f64, (i + 1) as f64));
        for j in 0..i {
            // the pair (i, j) and (j, i) contribute 2·Re(a_i conj(a_j))·K
            let k = kernel.eval_f64((i + 1) as f64, (j + 1) as f64);
            acc.add(2.0 * (e[i] * e[j].conj()).re * k);
        }
    }
    acc.value()
}

/// The form computed exactly for rational sequences and kernel values.
pub fn quadform_exact(kernel: &Kernel, a: &CoefficientSequence) -> Result<Rational> {
    let e = a
        .exact()
        .ok_or_else(|| Error::Mode("exact form needs rational coefficients".into()))?;
    let mut acc = int(0);
    for (i, x) in e.iter().enumerate() {
        for (j, y) in e.iter().enumerate() {
            let k = kernel.eval(&int(i as i64 + 1), &int(j as i64 + 1), &EvalMode::Exact)?;
            acc += x * y * k.exact().expect("exact mode");
        }
    }
    Ok(acc)
}

/// The max-family form in `O(N)`: with `c_m = a_m m^{α−1/2}` and prefix sums
/// `P_m`, it equals `Σ_m m^{−2α}(|c_m|² + 2 Re(conj(c_m) P_{m−1}))`.
pub fn quadform_fast_max(alpha: f64, a: &CoefficientSequence) -> f64 {
    let mut pre_re = KahanSum::new();
    let mut pre_im = KahanSum::new();
    let mut acc = KahanSum::new();
    for (i, z) in a.entries().iter().enumerate() {
        let m = (i + 1) as f64;
        let c = z * m.powf(alpha - 0.5);
        let p = Complex64::new(pre_re.value(), pre_im.value());
        acc.add(m.powf(-2.0 * alpha) * (c.norm_sqr() + 2.0 * (c.conj() * p).re));
        pre_re.add(c.re);
        pre_im.add(c.im);
    }
    acc.value()
}

/// Uses the linear-time evaluator for the max family, the naive one otherwise.
pub fn quadform(kernel: &Kernel, a: &CoefficientSequence) -> f64 {
    match kernel.family() {
        KernelFamily::MaxFamily(alpha) => quadform_fast_max(alpha.as_f64(), a),
        _ => quadform_naive(kernel, a),
    }
}

/// Form over squared norm; a lower bound for the best constant.
pub fn rayleigh_quotient(kernel: &Kernel, a: &CoefficientSequence) -> Result<f64> {
    let norm = a.norm_sq();
    if norm == 0.0 {
        return Err(domain("Rayleigh quotient of the zero sequence"));
    }
    Ok(quadform(kernel, a) / norm)
}

pub fn rayleigh_quotient_exact(kernel: &Kernel, a: &CoefficientSequence) -> Result<Rational> {
    let form = quadform_exact(kernel, a)?;
    let norm = a.norm_sq_exact().expect("exact sequence");
    if norm.is_zero() {
        return Err(domain("Rayleigh quotient of the zero sequence"));
    }
    Ok(form / norm)
}

/// `(Mv)_m = m^{α−1/2}(m^{−2α} P_m + Q_{m+1})` for `M = [K_α(m, n)]`, with
/// `P_m = Σ_{n≤m} n^{α−1/2} v_n` and `Q_{m+1} = Σ_{n>m} n^{−α−1/2} v_n`.
pub fn max_kernel_matvec(alpha: f64, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let up: Vec<f64> = (1..=n).map(|m| (m as f64).powf(alpha - 0.5)).collect();
    let down: Vec<f64> = (1..=n).map(|m| (m as f64).powf(-alpha - 0.5)).collect();
    matvec_with(&up, &down, alpha, v)
}

fn matvec_with(up: &[f64], down: &[f64], alpha: f64, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut q = vec![0.0; n + 1];
    let mut acc = KahanSum::new();
    for i in (0..n).rev() {
        acc.add(down[i] * v[i]);
        q[i] = acc.value();
    }
    let mut p = KahanSum::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        p.add(up[i] * v[i]);
        let m = (i + 1) as f64;
        out.push(up[i] * (m.powf(-2.0 * alpha) * p.value() + q[i + 1]));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralStatus {
    Converged,
    /// The iteration cap was reached first; the estimate is still a lower
    /// bound in exact arithmetic but its residual exceeds the tolerance.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub n: usize,
    pub lambda_max: f64,
    pub iterations: usize,
    pub residual: f64,
    pub status: SpectralStatus,
}

/// Largest eigenvalue of `[K_α(m, n)]_{m,n ≤ N}` by power iteration from the
/// all-ones vector, stopping once `‖Mv − λv‖/‖v‖ ≤ tol`.
pub fn power_iteration_lambda_max(
    alpha: f64,
    n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralEstimate> {
    if n == 0 {
        return Err(domain("truncation N must be at least 1"));
    }
    if !(tol > 0.0) || !(alpha > 0.0) {
        return Err(domain("tolerance and alpha must be positive"));
    }
    let up: Vec<f64> = (1..=n).map(|m| (m as f64).powf(alpha - 0.5)).collect();
    let down: Vec<f64> = (1..=n).map(|m| (m as f64).powf(-alpha - 0.5)).collect();
    let norm = |x: &[f64]| x.iter().map(|t| t * t).collect::<KahanSum>().value().sqrt();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let w = matvec_with(&up, &down, alpha, &v);
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).collect::<KahanSum>().value();
        let r: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - lambda * b).collect();
        residual = norm(&r);
        if residual <= tol {
            return Ok(SpectralEstimate {
                n,
                lambda_max: lambda,
                iterations: it,
                residual,
                status: SpectralStatus::Converged,
            });
        }
        let wn = norm(&w);
        v = w.into_iter().map(|x| x / wn).collect();
    }
    Ok(SpectralEstimate {
        n,
        lambda_max: lambda,
        iterations: max_iter,
        residual,
        status: SpectralStatus::Inconclusive,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalBound {
    pub value: f64,
    pub n: usize,
    pub epsilon: f64,
    /// `Σ_{m>N} m^{−1−2ε} ≤ N^{−2ε}/(2ε)`, the norm mass lost by truncating.
    pub norm_tail: f64,
}

/// Rayleigh quotient of `a_m = m^{−1/2−ε}`, `m ≤ N`.
pub fn extremal_lower_bound(kernel: &Kernel, epsilon: f64, n: usize) -> Result<ExtremalBound> {
    if !(epsilon > 0.0) || n == 0 {
        return Err(domain("need epsilon > 0 and N ≥ 1"));
    }
    let a = CoefficientSequence::from_real(
        (1..=n).map(|m| (m as f64).powf(-0.5 - epsilon)).collect(),
    )?;
    Ok(ExtremalBound {
        value: rayleigh_quotient(kernel, &a)?,
        n,
        epsilon,
        norm_tail: (n as f64).powf(-2.0 * epsilon) / (2.0 * epsilon),
    })
}
