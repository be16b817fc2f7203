//! Certified constants for Hilbert-type bilinear inequalities
//!
//! ```text
//!     Σ_m Σ_n a_m conj(a_n) K(m, n)  ≤  C(K) Σ_m |a_m|²
//! ```
//!
//! where `K` is positive, symmetric and homogeneous of degree −1. The crate
//! centres on the family `K_α(x, y) = (xy)^{α−1/2} / max(x, y)^{2α}`, for
//! which the continuous constant is `2/α`, and on the question of when the
//! discrete constant agrees with it.
//!
//! Every claim that ends up in a [`schur::Certificate`] is decided with
//! exact-rational [`numerics::Enclosure`]s; floating point is only used for
//! exploration (spectra, quadrature, plot data).
//!
//! Modules:
//! - [`numerics`]: rationals, enclosures, radicals, elementary functions.
//! - [`kernels`]: kernel descriptors and their profiles `k(y) = K(1,y)/√y`.
//! - [`quadform`]: quadratic forms, fast max-kernel evaluation, spectra.
//! - [`eulermaclaurin`]: tail and partial-sum bounds, zeta enclosures.
//! - [`schur`]: the two-level Schur weight, criterion margins, certificates.
//! - [`continuous`]: the continuous constant, test functions, the Poisson
//!   representation of the form and Riemann-sum comparisons.
//! - [`cli`]: command implementations behind the `hilbert-ineq` binary.

pub mod cli;
pub mod continuous;
pub mod error;
pub mod eulermaclaurin;
pub mod kernels;
pub mod numerics;
pub mod quadform;
pub mod schur;

pub use error::{Error, Result};

/// Version string written into certificates.
pub const TOOL_VERSION: &str = concat!("hilbert-ineq ", env!("CARGO_PKG_VERSION"));
