//! Command implementations behind the `hilbert-ineq` binary.
//!
//! Exit codes: 0 certified (or report produced), 1 falsified, 2 inconclusive,
//! 64 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value as Json};

use crate::continuous::{
    continuous_constant, integral_representation_check, riemann_sum_comparison, IntrepOptions, Rule,
};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::numerics::{
    int, parse_fraction, parse_number, to_f64, Enclosure, Precision, Rational, Surd,
};
use crate::quadform::{power_iteration_lambda_max, CoefficientSequence, SpectralStatus};
use crate::schur::{
    alpha0_solve, badest_bound, certify, check_quoted_decimal, delta_interval, threshold_alpha,
    uniform_margin, Certificate, CertifyOptions, DeltaMode, Quantity, DECIMAL_DIGITS,
};

pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Enclosure,
    /// Enclosure arithmetic with Euler–Maclaurin bounds (delta reports).
    Em,
    /// Enclosure arithmetic with enclosed row sums (delta reports).
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Left,
    Right,
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = Mode::Enclosure, global = true)]
    pub mode: Mode,
    /// Enclosure width cap `2^-bits`.
    #[arg(long, default_value_t = 128, global = true)]
    pub precision_bits: u32,
    #[arg(long, default_value_t = 64, global = true)]
    pub finite_m: u64,
    #[arg(long, default_value_t = 10_000, global = true)]
    pub tail_split: u64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

impl RunConfig {
    fn precision(&self) -> Precision {
        Precision::new(self.precision_bits)
    }

    fn provenance(&self) -> Json {
        json!({
            "mode": format!("{:?}", self.mode).to_lowercase(),
            "precision_bits": self.precision_bits,
            "finite_m": self.finite_m,
            "tail_split": self.tail_split,
        })
    }

    /// Certificate paths take exact fractions only; decimals are accepted in
    /// float mode.
    fn parse_alpha(&self, s: &str) -> Result<Rational> {
        let a = match self.mode {
            Mode::Float => parse_number(s)?,
            _ => parse_fraction(s).map_err(|_| {
                Error::Parse(format!("`{s}` is not a fraction p/q (decimals need --mode float)"))
            })?,
        };
        if !a.is_positive() {
            return Err(Error::Domain(format!("alpha = {s} must be positive")));
        }
        Ok(a)
    }

    fn require_enclosure(&self, what: &str) -> Result<()> {
        if self.mode == Mode::Float {
            return Err(Error::Mode(format!("{what} needs enclosure mode")));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "hilbert-ineq", version, about = "Certified constants for Hilbert-type inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify C_α = 2/α for the max family, or re-check a saved certificate.
    Verify {
        /// α as a fraction p/q with 0 < α < 2.
        #[arg(required_unless_present = "recheck")]
        alpha: Option<String>,
        #[arg(long, conflicts_with = "alpha")]
        recheck: Option<PathBuf>,
    },
    /// Reports on constants, weights, thresholds and spectra.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReportKind {
    /// Continuous constants B(K).
    Constants {
        /// Kernels: `p/q`, `max-family:p/q` or `hilbert`.
        #[arg(default_values_t = ["1/2".to_string(), "1".to_string(), "3/2".to_string(), "hilbert".to_string()])]
        kernels: Vec<String>,
    },
    /// Feasibility interval for the weight value at m = 1.
    Delta {
        alpha: String,
        /// Decimal quoted for the lower endpoint, checked as truncated.
        #[arg(long)]
        quoted_lower: Option<String>,
        #[arg(long)]
        quoted_upper: Option<String>,
    },
    /// The α where the criterion at row m changes sign.
    Threshold {
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value = "1")]
        lo: String,
        #[arg(long, default_value = "199/100")]
        hi: String,
        #[arg(long, default_value = "1/1000000")]
        tol: String,
    },
    /// The root of αζ(1+α) = 2.
    Alpha0 {
        #[arg(long, default_value = "1/100000000")]
        tol: String,
    },
    /// Largest eigenvalues of finite sections.
    Spectrum {
        alpha: String,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Checks the Poisson-kernel integral representation of the form.
    Intrep {
        alpha: String,
        /// Comma-separated real coefficients.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "file")]
        coeffs: Vec<f64>,
        /// File with one coefficient (`re` or `re im`) per line.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Riemann sums of y^{−ε}k_α(y) on the grid Z/m.
    Riemann {
        alpha: String,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        /// Upper end; `inf` for the half-line.
        #[arg(long, default_value = "inf")]
        hi: String,
        #[arg(long, value_enum, default_value_t = RuleArg::Right)]
        rule: RuleArg,
    },
}

/// A rendered command result.
struct Output {
    json: Json,
    text: String,
    csv: String,
    exit: i32,
}

impl Output {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json value");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::Bracket(_) => 2,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.render(cli.config.format).as_bytes());
            o.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Verify { recheck: Some(path), .. } => cmd_recheck(cfg, path),
        Command::Verify { alpha: Some(a), .. } => cmd_verify(cfg, a),
        Command::Verify { .. } => Err(Error::Parse("verify needs α or --recheck".into())),
        Command::Report { kind } => match kind {
            ReportKind::Constants { kernels } => report_constants(cfg, kernels),
            ReportKind::Delta { alpha, quoted_lower, quoted_upper } => {
                report_delta(cfg, alpha, quoted_lower.as_deref(), quoted_upper.as_deref())
            }
            ReportKind::Threshold { m, lo, hi, tol } => report_threshold(cfg, *m, lo, hi, tol),
            ReportKind::Alpha0 { tol } => report_alpha0(cfg, tol),
            ReportKind::Spectrum { alpha, n, tol, max_iter } => {
                report_spectrum(cfg, alpha, n, *tol, *max_iter)
            }
            ReportKind::Intrep { alpha, coeffs, file, t_max, step, tol } => {
                let a = match file {
                    Some(p) => CoefficientSequence::read_file(p)?,
                    None if coeffs.is_empty() => {
                        return Err(Error::Parse("intrep needs --coeffs or --file".into()))
                    }
                    None => CoefficientSequence::from_real(coeffs.clone())?,
                };
                let opts = IntrepOptions { t_max: *t_max, step: *step, tol: *tol };
                report_intrep(cfg, alpha, &a, &opts)
            }
            ReportKind::Riemann { alpha, m, epsilon, lo, hi, rule } => {
                report_riemann(cfg, alpha, *m, *epsilon, *lo, hi, *rule)
            }
        },
    }
}

fn timestamp(cfg: &RunConfig) -> Option<String> {
    (!cfg.no_timestamp)
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn certificate_output(cert: &Certificate) -> Result<Output> {
    let json: Json = serde_json::from_str(&cert.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
    let mut text = String::new();
    let _ = writeln!(text, "alpha {}: {}", cert.alpha, cert.status);
    if let Some(c) = &cert.constant {
        let _ = writeln!(text, "constant: {c}");
    }
    let _ = writeln!(text, "method: {}", cert.method);
    if let Some(u) = &cert.uniform {
        let rel = if u.holds { "<" } else { "not <" };
        let _ = writeln!(text, "zeta bound (split {}): {} {rel} {}", u.split, u.zeta_bound, u.induced_bound);
    }
    let _ = writeln!(text, "zeta({}) in [{}, {}]", cert.zeta.s, cert.zeta.lo, cert.zeta.hi);
    if let Some(first) = cert.margins.first() {
        let _ = writeln!(text, "margin m={}: [{}, {}]", first.m, first.lo, first.hi);
    }
    if let Some(last) = cert.margins.last() {
        let _ = writeln!(text, "margin m={}: [{}, {}]", last.m, last.lo, last.hi);
    }
    let mut csv = String::from("m,lo,hi\n");
    for r in &cert.margins {
        let _ = writeln!(csv, "{},{},{}", r.m, r.lo, r.hi);
    }
    Ok(Output { json, text, csv, exit: cert.status.exit_code() })
}

fn cmd_verify(cfg: &RunConfig, alpha: &str) -> Result<Output> {
    cfg.require_enclosure("verify")?;
    let a = cfg.parse_alpha(alpha)?;
    if a >= int(2) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 2)")));
    }
    let opts = CertifyOptions {
        finite_m: cfg.finite_m,
        tail_split: cfg.tail_split,
        precision: cfg.precision(),
        ..CertifyOptions::default()
    };
    let mut cert = certify(&a, &opts)?;
    cert.timestamp = timestamp(cfg);
    certificate_output(&cert)
}

fn cmd_recheck(cfg: &RunConfig, path: &PathBuf) -> Result<Output> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text)?;
    let r = cert.recheck(&cfg.precision())?;
    let exit = if r.matches { r.status.exit_code() } else { 2 };
    let json = json!({
        "alpha": cert.alpha,
        "recorded": r.recorded,
        "status": r.status,
        "matches": r.matches,
    });
    let verdict = if r.matches { "reproduced" } else { "MISMATCH" };
    let text = format!(
        "alpha {}: recorded {}, recomputed {} ({verdict})\n",
        cert.alpha, r.recorded, r.status
    );
    let csv = format!("alpha,recorded,status,matches\n{},{},{},{}\n", cert.alpha, r.recorded, r.status, r.matches);
    Ok(Output { json, text, csv, exit })
}

fn parse_kernel(s: &str) -> Result<Kernel> {
    if s.contains(':') || s == "hilbert" {
        Kernel::parse(s)
    } else {
        Kernel::max_family(parse_fraction(s)?)
    }
}

fn enc_pair(e: &Enclosure) -> (String, String) {
    e.to_decimal_pair(DECIMAL_DIGITS)
}

fn quantity_json(q: &Quantity) -> Json {
    let (lo, hi) = enc_pair(&q.enclosure);
    json!({
        "exact": q.exact.as_ref().map(|s| s.to_string()),
        "lo": lo,
        "hi": hi,
    })
}

fn report_constants(cfg: &RunConfig, kernels: &[String]) -> Result<Output> {
    let prec = cfg.precision();
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut csv = String::from("kernel,b_lo,b_hi,method,uniform_bound\n");
    for spec in kernels {
        let k = parse_kernel(spec)?;
        let c = continuous_constant(&k, &prec.width_cap())?;
        let (lo, hi) = enc_pair(&c.b);
        let method = serde_json::to_value(c.method).expect("method");
        let method = method.as_str().unwrap_or_default().to_string();
        // the all-m Schur bound 2/α − (2/α−1)G(α), defined on [1, 2)
        let uniform = match k.family() {
            KernelFamily::MaxFamily(a) => match a.exact() {
                Some(a) if a >= &Rational::one() && a < &int(2) => {
                    Some(uniform_margin(a, &prec)?.induced_bound)
                }
                _ => None,
            },
            _ => None,
        };
        let exact = c.b.is_point().then(|| c.b.lo().to_string());
        let badest = match k.family() {
            KernelFamily::MaxFamily(a) => a.exact().map(|a| badest_bound(a)).transpose()?,
            _ => None,
        };
        let _ = write!(text, "{}: B = ", c.kernel);
        match &exact {
            Some(e) => {
                let _ = write!(text, "{e}");
            }
            None => {
                let _ = write!(text, "[{lo}, {hi}]");
            }
        }
        let _ = write!(text, " ({method})");
        if let Some(u) = &uniform {
            let _ = write!(text, "; uniform Schur bound {u}");
        }
        text.push('\n');
        let _ = writeln!(
            csv,
            "{},{lo},{hi},{method},{}",
            c.kernel,
            uniform.as_ref().map(|u| u.enclosure.mid_f64().to_string()).unwrap_or_default()
        );
        rows.push(json!({
            "kernel": c.kernel,
            "b": { "exact": exact, "lo": lo, "hi": hi },
            "method": method,
            "uniform_bound": uniform.as_ref().map(quantity_json),
            "row_integral_bound": badest.map(|b| b.to_string()),
        }));
    }
    Ok(Output {
        json: json!({ "kind": "constants", "config": cfg.provenance(), "constants": rows }),
        text,
        csv,
        exit: 0,
    })
}

fn report_delta(
    cfg: &RunConfig,
    alpha: &str,
    quoted_lower: Option<&str>,
    quoted_upper: Option<&str>,
) -> Result<Output> {
    cfg.require_enclosure("delta")?;
    let a = cfg.parse_alpha(alpha)?;
    let mode = match cfg.mode {
        Mode::Numeric => DeltaMode::Numeric,
        _ => DeltaMode::EmCertified,
    };
    let d = delta_interval(&a, mode, cfg.finite_m, cfg.tail_split, &cfg.precision())?;
    let checks: Vec<_> = [("lower", quoted_lower, &d.lower), ("upper", quoted_upper, &d.upper)]
        .into_iter()
        .filter_map(|(end, q, v)| q.map(|q| (end, q, v)))
        .map(|(end, q, v)| check_quoted_decimal(&v.enclosure, q).map(|c| (end, c)))
        .collect::<Result<_>>()?;
    let mut text = format!("delta interval for alpha {a} ({mode:?}):\n");
    let _ = writeln!(text, "  lower: {}", d.lower);
    let _ = writeln!(text, "  upper: {}", d.upper);
    let _ = writeln!(text, "  ≈ [{:.9}, {:.9}]", d.lower.enclosure.mid_f64(), d.upper.enclosure.mid_f64());
    if let Some(m) = d.binding_m {
        let _ = writeln!(text, "  binding row m = {m}");
    }
    let feasible = match d.feasible {
        Some(true) => "nonempty",
        Some(false) => "empty",
        None => "undecided",
    };
    let _ = writeln!(text, "  interval {feasible}");
    for (end, c) in &checks {
        let verdict = if c.consistent { "consistent" } else { "DISCREPANCY" };
        let _ = writeln!(text, "  quoted {end} {}: computed {} ({verdict})", c.quoted, c.computed);
    }
    let (llo, lhi) = enc_pair(&d.lower.enclosure);
    let (ulo, uhi) = enc_pair(&d.upper.enclosure);
    let csv = format!("end,lo,hi\nlower,{llo},{lhi}\nupper,{ulo},{uhi}\n");
    let json = json!({
        "kind": "delta",
        "config": cfg.provenance(),
        "alpha": a.to_string(),
        "mode": mode,
        "lower": quantity_json(&d.lower),
        "upper": quantity_json(&d.upper),
        "binding_m": d.binding_m,
        "feasible": d.feasible,
        "quoted_checks": checks.iter().map(|(end, c)| json!({
            "end": end, "quoted": c.quoted, "computed": c.computed, "consistent": c.consistent,
        })).collect::<Vec<_>>(),
    });
    Ok(Output { json, text, csv, exit: 0 })
}

fn report_threshold(cfg: &RunConfig, m: u64, lo: &str, hi: &str, tol: &str) -> Result<Output> {
    cfg.require_enclosure("threshold")?;
    let (lo, hi, tol) = (parse_number(lo)?, parse_number(hi)?, parse_number(tol)?);
    let root = threshold_alpha(m, (lo, hi), &tol)?;
    let (blo, bhi) = enc_pair(&root.bracket);
    let text = format!(
        "criterion at m = {m} changes sign for alpha in [{blo}, {bhi}] ≈ {:.7} ({} bisection steps)\n",
        root.midpoint_f64(),
        root.steps
    );
    let csv = format!("m,lo,hi,steps\n{m},{blo},{bhi},{}\n", root.steps);
    let json = json!({
        "kind": "threshold",
        "config": cfg.provenance(),
        "m": m,
        "bracket": { "lo": blo, "hi": bhi },
        "midpoint": root.midpoint_f64(),
        "steps": root.steps,
    });
    Ok(Output { json, text, csv, exit: 0 })
}

fn report_alpha0(cfg: &RunConfig, tol: &str) -> Result<Output> {
    cfg.require_enclosure("alpha0")?;
    let r = alpha0_solve(&parse_number(tol)?)?;
    let (alo, ahi) = enc_pair(&r.alpha);
    let (rlo, rhi) = enc_pair(&r.residual);
    let text = format!(
        "alpha0 in [{alo}, {ahi}] ≈ {:.10}\nalpha·zeta(1+alpha) − 2 in [{rlo}, {rhi}]\n",
        r.alpha.mid_f64()
    );
    let csv = format!("lo,hi,residual_lo,residual_hi\n{alo},{ahi},{rlo},{rhi}\n");
    let json = json!({
        "kind": "alpha0",
        "config": cfg.provenance(),
        "alpha": { "lo": alo, "hi": ahi },
        "residual": { "lo": rlo, "hi": rhi },
        "steps": r.steps,
    });
    Ok(Output { json, text, csv, exit: 0 })
}

/// Largest eigenvalue of the 2×2 section, `3/4 + √(1/16 + 2^{−2α−1})`, when
/// the radicand is rational.
fn two_by_two_exact(alpha: &Rational) -> Option<Surd> {
    let e = -(alpha * int(2) + int(1));
    if !e.is_integer() {
        return None;
    }
    let p = e.to_integer().to_i64()?;
    let radicand = Rational::new(1.into(), 16.into()) + crate::numerics::pow2(p);
    let (num, den) = (radicand.numer().to_u64()?, radicand.denom().to_u64()?);
    let root = Surd::sqrt_int(num.checked_mul(den)?).scale(&Rational::new(1.into(), den.into()));
    Some(Surd::from_rational(Rational::new(3.into(), 4.into())).plus(&root))
}

fn report_spectrum(cfg: &RunConfig, alpha: &str, ns: &[usize], tol: f64, max_iter: usize) -> Result<Output> {
    let a = cfg.parse_alpha(alpha)?;
    let af = to_f64(&a);
    let mut rows = Vec::new();
    let mut text = format!("largest eigenvalues of [K_alpha(m,n)], alpha = {a} (2/alpha = {:.12}):\n", 2.0 / af);
    let mut csv = String::from("n,lambda_max,iterations,residual,converged,exact\n");
    for &n in ns {
        let e = power_iteration_lambda_max(af, n, tol, max_iter)?;
        let exact = match n {
            1 => Some(Surd::from_rational(int(1))),
            2 => two_by_two_exact(&a),
            _ => None,
        };
        let converged = e.status == SpectralStatus::Converged;
        let _ = write!(text, "  N = {n:>6}: {:.12}", e.lambda_max);
        if let Some(x) = &exact {
            let _ = write!(text, " = {x}");
        }
        if !converged {
            let _ = write!(text, " (not converged, residual {:.2e})", e.residual);
        }
        text.push('\n');
        let exact_s = exact.as_ref().map(|x| x.to_string());
        let _ = writeln!(
            csv,
            "{n},{},{},{},{converged},{}",
            e.lambda_max,
            e.iterations,
            e.residual,
            exact_s.clone().unwrap_or_default()
        );
        rows.push(json!({
            "n": n,
            "lambda_max": e.lambda_max,
            "iterations": e.iterations,
            "residual": e.residual,
            "converged": converged,
            "exact": exact_s,
        }));
    }
    let json = json!({
        "kind": "spectrum",
        "config": cfg.provenance(),
        "alpha": a.to_string(),
        "continuous_constant": 2.0 / af,
        "sections": rows,
    });
    Ok(Output { json, text, csv, exit: 0 })
}

fn report_intrep(cfg: &RunConfig, alpha: &str, a: &CoefficientSequence, opts: &IntrepOptions) -> Result<Output> {
    let al = to_f64(&cfg.parse_alpha(alpha)?);
    let r = integral_representation_check(al, a, opts)?;
    let text = format!(
        "alpha·form = {:.15}\nintegral   = {:.15} (quadrature {:.15} + diagonal tail {:.3e})\n\
         discrepancy {:.3e}, off-diagonal tail bound {:.3e}, T = {:.1}, {} steps\n",
        r.lhs, r.rhs, r.quadrature, r.diagonal_tail, r.discrepancy, r.tail_bound, r.t_max, r.steps
    );
    let csv = format!(
        "lhs,rhs,quadrature,diagonal_tail,tail_bound,t_max,steps,discrepancy\n{},{},{},{},{},{},{},{}\n",
        r.lhs, r.rhs, r.quadrature, r.diagonal_tail, r.tail_bound, r.t_max, r.steps, r.discrepancy
    );
    let mut json = json!({ "kind": "intrep", "config": cfg.provenance(), "n": a.len() });
    json["report"] = serde_json::to_value(&r).expect("report");
    Ok(Output { json, text, csv, exit: 0 })
}

fn report_riemann(
    cfg: &RunConfig,
    alpha: &str,
    m: u64,
    eps: f64,
    lo: f64,
    hi: &str,
    rule: RuleArg,
) -> Result<Output> {
    let a = to_f64(&cfg.parse_alpha(alpha)?);
    let hi = match hi {
        "inf" | "infinity" => f64::INFINITY,
        s => s.parse().map_err(|_| Error::Parse(format!("bad upper end `{s}`")))?,
    };
    let rule = match rule {
        RuleArg::Left => Rule::Left,
        RuleArg::Right => Rule::Right,
    };
    let r = riemann_sum_comparison(a, m, eps, (lo, hi), rule)?;
    let relation = if r.overestimates() {
        "sum ≥ integral"
    } else if r.underestimates() {
        "sum ≤ integral"
    } else {
        "undecided"
    };
    let text = format!(
        "{:?} sums, alpha = {a}, m = {m}, epsilon = {eps}, window [{}, {}]:\n  sum in [{:.12}, {:.12}], integral {:.12}: {relation}\n",
        rule, r.window.0, r.window.1, r.sum_bounds.0, r.sum_bounds.1, r.integral
    );
    let csv = r.to_csv();
    let mut json = json!({ "kind": "riemann", "config": cfg.provenance(), "relation": relation });
    json["report"] = serde_json::to_value(&r).expect("report");
    Ok(Output { json, text, csv, exit: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hilbert-ineq").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(call(&["verify", "abc"]).0, 64);
        assert_eq!(call(&["verify", "1.5"]).0, 64);
        assert_eq!(call(&["verify", "5/2"]).0, 64);
        assert_eq!(call(&["report", "nonsense"]).0, 64);
        assert_eq!(call(&["--mode", "float", "verify", "3/2"]).0, 64);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn spectrum_two_by_two() {
        let (code, out, _) = call(&["report", "spectrum", "3/2", "--n", "1,2"]);
        assert_eq!(code, 0);
        assert!(out.contains("= 1\n"), "{out}");
        assert!(out.contains("√2/4 + 3/4") || out.contains("3/4 + √2/4"), "{out}");
        assert!((two_by_two_exact(&int(1)).unwrap().to_f64() - (0.75 + (1.0f64 / 16.0 + 0.125).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn decimals_only_in_float_mode() {
        let (code, out, _) = call(&["--mode", "float", "report", "spectrum", "1.5", "--n", "2"]);
        assert_eq!(code, 0, "{out}");
        let (code, _, _) = call(&["report", "spectrum", "1.5", "--n", "2"]);
        assert_eq!(code, 64);
    }

    #[test]
    fn riemann_csv() {
        let (code, out, _) = call(&[
            "--format", "csv", "report", "riemann", "1/2", "--m", "2", "--epsilon", "0.25", "--lo", "1", "--hi", "5",
            "--rule", "left",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("y_left,y_right,rect_height,integrand\n"));
        assert_eq!(out.lines().count(), 9);
    }
}
