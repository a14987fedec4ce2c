use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use super::format::format_fixed;
use super::precision::PrecisionCtx;
use crate::error::{Error, Result};

/// Guard bits used inside complex division before the final rounding.
const DIV_GUARD_BITS: u32 = 32;

/// Arbitrary-precision complex number.
///
/// Both parts share one precision. Binary operations produce a result at the
/// larger of the two operand precisions. Addition, subtraction and
/// multiplication are correctly rounded per component (products use a fused
/// `ab - cd` so only one rounding happens).
#[derive(Clone, Debug, PartialEq)]
pub struct CNum {
    re: Float,
    im: Float,
}

impl CNum {
    /// Builds a value from two parts, promoting both to the wider precision.
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(ctx: &PrecisionCtx) -> Self {
        Self::new(ctx.zero(), ctx.zero())
    }

    pub fn one(ctx: &PrecisionCtx) -> Self {
        Self::new(ctx.int(1), ctx.zero())
    }

    pub fn i(ctx: &PrecisionCtx) -> Self {
        Self::new(ctx.zero(), ctx.int(1))
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn from_f64(ctx: &PrecisionCtx, re: f64, im: f64) -> Self {
        Self::new(ctx.real(re), ctx.real(im))
    }

    /// Parses decimal real and imaginary parts at working precision.
    pub fn parse(ctx: &PrecisionCtx, re: &str, im: &str) -> Result<Self> {
        Ok(Self::new(ctx.parse_real(re)?, ctx.parse_real(im)?))
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.re, self.im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Re-rounds both parts to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    /// `|re| + |im|`, an ordering surrogate for the modulus.
    pub fn norm_l1(&self) -> Float {
        Float::with_val(self.prec(), self.re.abs_ref())
            + Float::with_val(self.prec(), self.im.abs_ref())
    }

    /// Modulus, correctly rounded.
    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Largest binary exponent among the two parts, `None` for zero.
    pub fn max_exp(&self) -> Option<i32> {
        match (self.re.get_exp(), self.im.get_exp()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    /// Exact multiplication by `2^exp`.
    pub fn mul_pow2(&self, exp: i32) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re << exp),
            im: Float::with_val(self.prec(), &self.im << exp),
        }
    }

    pub fn mul_real(&self, k: &Float) -> Self {
        let prec = self.prec().max(k.prec());
        Self {
            re: Float::with_val(prec, &self.re * k),
            im: Float::with_val(prec, &self.im * k),
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re * k),
            im: Float::with_val(self.prec(), &self.im * k),
        }
    }

    pub fn div_real(&self, k: &Float) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec().max(k.prec());
        Ok(Self {
            re: Float::with_val(prec, &self.re / k),
            im: Float::with_val(prec, &self.im / k),
        })
    }

    pub fn div_int(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self {
            re: Float::with_val(self.prec(), &self.re / k),
            im: Float::with_val(self.prec(), &self.im / k),
        })
    }

    pub fn add_real(&self, k: &Float) -> Self {
        let prec = self.prec().max(k.prec());
        Self {
            re: Float::with_val(prec, &self.re + k),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn sub_real(&self, k: &Float) -> Self {
        let prec = self.prec().max(k.prec());
        Self {
            re: Float::with_val(prec, &self.re - k),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Complex division using the scaled (Smith) algorithm at extra
    /// precision, then rounded back.
    pub fn checked_div(&self, rhs: &CNum) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec().max(rhs.prec());
        let work = prec + DIV_GUARD_BITS;
        let (a, b) = (&self.re, &self.im);
        let (c, d) = (&rhs.re, &rhs.im);
        let (re, im) = if c.cmp_abs(d) != Some(Ordering::Less) {
            // |c| >= |d|
            let r = Float::with_val(work, d / c);
            let den = Float::with_val(work, c + Float::with_val(work, d * &r));
            let re = Float::with_val(work, a + Float::with_val(work, b * &r)) / &den;
            let im = Float::with_val(work, b - Float::with_val(work, a * &r)) / &den;
            (re, im)
        } else {
            let r = Float::with_val(work, c / d);
            let den = Float::with_val(work, Float::with_val(work, c * &r) + d);
            let re = Float::with_val(work, Float::with_val(work, a * &r) + b) / &den;
            let im = Float::with_val(work, Float::with_val(work, b * &r) - a) / &den;
            (re, im)
        };
        Ok(Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        })
    }

    pub fn recip(&self) -> Result<Self> {
        let one = CNum::new(Float::with_val(self.prec(), 1), Float::new(self.prec()));
        one.checked_div(self)
    }

    /// Principal square root (branch cut on the negative real axis,
    /// `Re(sqrt) >= 0`). Only real square roots of non-negative values are used.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return self.clone();
        }
        let modulus = self.abs();
        // t = sqrt((|z| + |re|) / 2) is never a cancellation.
        let t = Float::with_val(
            prec,
            Float::with_val(prec, &modulus + Float::with_val(prec, self.re.abs_ref())) / 2u32,
        )
        .sqrt();
        let half_im_over_t = Float::with_val(prec, &self.im / &t) / 2u32;
        if self.re.is_sign_positive() {
            Self {
                re: t,
                im: half_im_over_t,
            }
        } else {
            let im = if self.im.is_sign_negative() { -t } else { t };
            Self {
                re: half_im_over_t.abs(),
                im,
            }
        }
    }

    /// Fixed-point rendering of both parts with `digits` significant digits.
    pub fn to_fixed(&self, digits: usize) -> (String, String) {
        (
            format_fixed(&self.re, digits),
            format_fixed(&self.im, digits),
        )
    }

    /// Low-precision view for diagnostics and plotting output.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for CNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(PrecisionCtx::DEFAULT_DIGITS);
        let re = format_fixed(&self.re, digits);
        let im = format_fixed(&self.im.clone().abs(), digits);
        let sign = if self.im.is_sign_negative() && !self.im.is_zero() {
            '-'
        } else {
            '+'
        };
        write!(f, "{re} {sign} {im}i")
    }
}

impl<'a> Add<&'a CNum> for &'a CNum {
    type Output = CNum;
    fn add(self, rhs: &'a CNum) -> CNum {
        let prec = self.prec().max(rhs.prec());
        CNum {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a CNum> for &'a CNum {
    type Output = CNum;
    fn sub(self, rhs: &'a CNum) -> CNum {
        let prec = self.prec().max(rhs.prec());
        CNum {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a CNum> for &'a CNum {
    type Output = CNum;
    fn mul(self, rhs: &'a CNum) -> CNum {
        let prec = self.prec().max(rhs.prec());
        let (a, b, c, d) = (&self.re, &self.im, &rhs.re, &rhs.im);
        CNum {
            re: Float::with_val(prec, a * c - b * d),
            im: Float::with_val(prec, a * d + b * c),
        }
    }
}

impl Neg for &CNum {
    type Output = CNum;
    fn neg(self) -> CNum {
        CNum {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CNum> for CNum {
            type Output = CNum;
            fn $m(self, rhs: CNum) -> CNum {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CNum> for CNum {
            type Output = CNum;
            fn $m(self, rhs: &'a CNum) -> CNum {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CNum {
    type Output = CNum;
    fn neg(self) -> CNum {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(128).unwrap()
    }

    fn c(re: f64, im: f64) -> CNum {
        CNum::from_f64(&ctx(), re, im)
    }

    #[test]
    fn basic_field_examples() {
        assert_eq!(&c(1.0, 0.0) + &c(0.0, 1.0), c(1.0, 1.0));
        assert_eq!(&c(0.0, 1.0) * &c(0.0, 1.0), c(-1.0, 0.0));
        assert_eq!(c(2.0, 0.0).checked_div(&c(1.0, 1.0)).unwrap(), c(1.0, -1.0));
    }

    #[test]
    fn divide_by_zero_is_an_error() {
        assert_eq!(
            c(1.0, 2.0).checked_div(&c(0.0, 0.0)),
            Err(Error::DivisionByZero)
        );
        assert_eq!(c(1.0, 2.0).div_int(0), Err(Error::DivisionByZero));
        assert!(CNum::zero(&ctx()).recip().is_err());
    }

    #[test]
    fn division_both_branches() {
        // |c| < |d| branch
        let q = c(3.0, 4.0).checked_div(&c(1.0, 2.0)).unwrap();
        let expected = CNum::parse(&ctx(), "2.2", "-0.4").unwrap();
        assert_eq!(q, expected);
        let back = &q * &c(1.0, 2.0);
        let err = (&back - &c(3.0, 4.0)).abs();
        assert!(err < 1e-36);
    }

    #[test]
    fn sqrt_principal_branch() {
        let s = c(-4.0, 0.0).sqrt();
        assert_eq!(s, c(0.0, 2.0));
        let s = c(-4.0, -0.0).sqrt();
        assert_eq!(s, c(0.0, -2.0));
        let s = c(3.0, 4.0).sqrt();
        assert_eq!(s, c(2.0, 1.0));
        let s = c(-3.0, -4.0).sqrt();
        assert_eq!(s, c(1.0, -2.0));
        assert!(s.re().is_sign_positive());
    }

    #[test]
    fn display_uses_fixed_digits() {
        let z = c(-0.5, -0.25);
        assert_eq!(format!("{z:.3}"), "-0.500 - 0.250i");
    }

    #[test]
    fn mixed_precision_promotes() {
        let hi = CNum::from_f64(&PrecisionCtx::with_bits(256).unwrap(), 1.0, 0.0);
        assert_eq!((&hi + &c(1.0, 0.0)).prec(), 256);
    }
}
