use rug::Float;

use crate::error::{param, Error, Result};

/// Working precision shared by every computation in a run.
///
/// `mantissa_bits` drives the arithmetic; `display_digits` is how many
/// significant decimal digits are printed. The printed digits never exceed
/// what the mantissa can carry, minus a five digit safety margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionCtx {
    mantissa_bits: u32,
    display_digits: usize,
}

impl PrecisionCtx {
    pub const MIN_BITS: u32 = 128;
    pub const DEFAULT_DIGITS: usize = 20;

    pub fn new(mantissa_bits: u32, display_digits: usize) -> Result<Self> {
        if mantissa_bits < Self::MIN_BITS {
            return param(format!(
                "mantissa_bits must be at least {}, got {mantissa_bits}",
                Self::MIN_BITS
            ));
        }
        if display_digits == 0 {
            return param("display_digits must be positive");
        }
        let max = Self::max_display_digits(mantissa_bits);
        if display_digits > max {
            return param(format!(
                "{display_digits} display digits exceed the {max} supported by {mantissa_bits} bits"
            ));
        }
        Ok(Self {
            mantissa_bits,
            display_digits,
        })
    }

    /// Context with the default 20 display digits.
    pub fn with_bits(mantissa_bits: u32) -> Result<Self> {
        Self::new(mantissa_bits, Self::DEFAULT_DIGITS)
    }

    /// Default context for Hankel determinants up to dimension `d_max`:
    /// `64 + 32 * d_max` bits, never below [`Self::MIN_BITS`].
    pub fn for_dimension(d_max: usize) -> Self {
        let bits = (64 + 32 * d_max as u64).clamp(Self::MIN_BITS as u64, u32::MAX as u64 / 4);
        Self {
            mantissa_bits: bits as u32,
            display_digits: Self::DEFAULT_DIGITS,
        }
    }

    /// `floor(bits * log10(2)) - 5`.
    pub fn max_display_digits(mantissa_bits: u32) -> usize {
        let digits = (mantissa_bits as f64 * std::f64::consts::LOG10_2).floor() as usize;
        digits.saturating_sub(5)
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn display_digits(&self) -> usize {
        self.display_digits
    }

    pub fn with_display_digits(self, display_digits: usize) -> Result<Self> {
        Self::new(self.mantissa_bits, display_digits)
    }

    /// Same display digits, twice the mantissa.
    pub fn doubled(&self) -> Self {
        Self {
            mantissa_bits: self.mantissa_bits * 2,
            display_digits: self.display_digits,
        }
    }

    /// Context with `extra` guard bits added.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            mantissa_bits: self.mantissa_bits + extra,
            display_digits: self.display_digits,
        }
    }

    pub fn zero(&self) -> Float {
        Float::new(self.mantissa_bits)
    }

    pub fn real(&self, value: f64) -> Float {
        Float::with_val(self.mantissa_bits, value)
    }

    pub fn int(&self, value: i64) -> Float {
        Float::with_val(self.mantissa_bits, value)
    }

    /// Exact power of two, `2^exp`.
    pub fn pow2(&self, exp: i32) -> Float {
        Float::with_val(self.mantissa_bits, 1) << exp
    }

    /// Parses a decimal literal, rounding to nearest at working precision.
    pub fn parse_real(&self, text: &str) -> Result<Float> {
        let text = text.trim();
        let parsed = Float::parse(text).map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
        let value = Float::with_val(self.mantissa_bits, parsed);
        if !value.is_finite() {
            return Err(Error::Parse(format!("{text:?} is not finite")));
        }
        Ok(value)
    }

    /// Rounds `x` to working precision.
    pub fn round(&self, x: &Float) -> Float {
        Float::with_val(self.mantissa_bits, x)
    }
}
