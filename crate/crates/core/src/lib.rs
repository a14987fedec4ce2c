//! Complex eigenvalues of `Φ'' + (ε − λe^{−q})Φ = 0`, `Φ(0) = 0`, by
//! Hankel-determinant (Riccati–Padé) quantization, with an independent
//! exact oracle built on zeros of `J_ν(2√(−λ))` in the Bessel order.
//!
//! Layering, bottom up:
//!
//! - [`mpnum`]: MPFR-backed complex numbers and dual numbers.
//! - [`riccati`]: Taylor coefficients `f_j(ε, λ)` of the regularized
//!   logarithmic derivative.
//! - [`hankel`]: `H_D^d(ε)` and `∂H/∂ε`.
//! - [`rpm`]: Newton roots of `H_D^d`, D-sequences and root clusters.
//! - [`oracle`]: exact eigenvalues `ε = −ν²/4` from the Bessel zeros.
//! - [`cli`]: the `rpm` command-line front end.

pub mod cli;
pub mod error;
pub mod hankel;
pub mod mpnum;
pub mod oracle;
pub mod riccati;
pub mod rpm;

pub use error::{Error, Result};
