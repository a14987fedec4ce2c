//! Multiple-precision complex arithmetic and forward-mode dual numbers.
//!
//! Real values are MPFR floats ([`rug::Float`]); every operation is rounded at
//! the precision carried by its operands. [`PrecisionCtx`] fixes that
//! precision for a run, and [`format_fixed`] renders results in the
//! fixed-point layout used for the convergence tables.

mod cnum;
mod dual;
mod format;
mod precision;

pub use cnum::CNum;
pub use dual::DualC;
pub use format::format_fixed;
pub use precision::PrecisionCtx;

/// Real scalar at arbitrary precision.
pub type Real = rug::Float;
