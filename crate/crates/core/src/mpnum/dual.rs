use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use super::cnum::CNum;
use super::precision::PrecisionCtx;
use crate::error::Result;

/// Forward-mode dual number over [`CNum`]: a value and its derivative with
/// respect to one complex variable.
///
/// `a + a'·δ` with `δ² = 0`. Which variable `der` refers to is up to the
/// caller (the energy for Hankel determinants, the Bessel order for the
/// reduced Bessel series).
#[derive(Clone, Debug, PartialEq)]
pub struct DualC {
    pub val: CNum,
    pub der: CNum,
}

impl DualC {
    pub fn new(val: CNum, der: CNum) -> Self {
        Self { val, der }
    }

    /// A constant: derivative zero.
    pub fn constant(val: CNum) -> Self {
        let der = CNum::new(Float::new(val.prec()), Float::new(val.prec()));
        Self { val, der }
    }

    /// The independent variable itself: derivative one.
    pub fn variable(val: CNum) -> Self {
        let der = CNum::new(Float::with_val(val.prec(), 1), Float::new(val.prec()));
        Self { val, der }
    }

    pub fn zero(ctx: &PrecisionCtx) -> Self {
        Self::constant(CNum::zero(ctx))
    }

    pub fn prec(&self) -> u32 {
        self.val.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            val: self.val.with_prec(prec),
            der: self.der.with_prec(prec),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_zero() && self.der.is_zero()
    }

    pub fn mul_real(&self, k: &Float) -> Self {
        Self {
            val: self.val.mul_real(k),
            der: self.der.mul_real(k),
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self {
            val: self.val.mul_int(k),
            der: self.der.mul_int(k),
        }
    }

    pub fn div_int(&self, k: i64) -> Result<Self> {
        Ok(Self {
            val: self.val.div_int(k)?,
            der: self.der.div_int(k)?,
        })
    }

    pub fn mul_pow2(&self, exp: i32) -> Self {
        Self {
            val: self.val.mul_pow2(exp),
            der: self.der.mul_pow2(exp),
        }
    }

    /// Adds a constant (derivative unchanged).
    pub fn add_const(&self, k: &CNum) -> Self {
        Self {
            val: &self.val + k,
            der: self.der.clone(),
        }
    }

    pub fn add_real(&self, k: &Float) -> Self {
        Self {
            val: self.val.add_real(k),
            der: self.der.clone(),
        }
    }

    pub fn sub_real(&self, k: &Float) -> Self {
        Self {
            val: self.val.sub_real(k),
            der: self.der.clone(),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Quotient rule; errors only when `rhs.val` is exactly zero.
    pub fn checked_div(&self, rhs: &DualC) -> Result<Self> {
        let inv = rhs.val.recip()?;
        let val = &self.val * &inv;
        // (a/b)' = (a' - (a/b)·b') / b
        let der = &(&self.der - &(&val * &rhs.der)) * &inv;
        Ok(Self { val, der })
    }

    pub fn recip(&self) -> Result<Self> {
        let inv = self.val.recip()?;
        let der = -&(&(&inv * &inv) * &self.der);
        Ok(Self { val: inv, der })
    }
}

impl<'a> Add<&'a DualC> for &'a DualC {
    type Output = DualC;
    fn add(self, rhs: &'a DualC) -> DualC {
        DualC {
            val: &self.val + &rhs.val,
            der: &self.der + &rhs.der,
        }
    }
}

impl<'a> Sub<&'a DualC> for &'a DualC {
    type Output = DualC;
    fn sub(self, rhs: &'a DualC) -> DualC {
        DualC {
            val: &self.val - &rhs.val,
            der: &self.der - &rhs.der,
        }
    }
}

impl<'a> Mul<&'a DualC> for &'a DualC {
    type Output = DualC;
    fn mul(self, rhs: &'a DualC) -> DualC {
        let (a, da, b, db) = (&self.val, &self.der, &rhs.val, &rhs.der);
        let prec = a.prec().max(b.prec());
        // a'·b + a·b', partial products carried with 64 guard bits.
        let re = Float::with_val(
            prec,
            Float::with_val(prec + 64, da.re() * b.re() - da.im() * b.im())
                + Float::with_val(prec + 64, a.re() * db.re() - a.im() * db.im()),
        );
        let im = Float::with_val(
            prec,
            Float::with_val(prec + 64, da.re() * b.im() + da.im() * b.re())
                + Float::with_val(prec + 64, a.re() * db.im() + a.im() * db.re()),
        );
        DualC {
            val: a * b,
            der: CNum::new(re, im),
        }
    }
}

impl Neg for &DualC {
    type Output = DualC;
    fn neg(self) -> DualC {
        DualC {
            val: -&self.val,
            der: -&self.der,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<DualC> for DualC {
            type Output = DualC;
            fn $m(self, rhs: DualC) -> DualC {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a DualC> for DualC {
            type Output = DualC;
            fn $m(self, rhs: &'a DualC) -> DualC {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DualC {
    type Output = DualC;
    fn neg(self) -> DualC {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(128).unwrap()
    }

    fn re(x: f64) -> CNum {
        CNum::from_f64(&ctx(), x, 0.0)
    }

    #[test]
    fn square_of_variable() {
        let e = DualC::variable(re(3.0));
        let sq = &e * &e;
        assert_eq!(sq.val, re(9.0));
        assert_eq!(sq.der, re(6.0));
    }

    #[test]
    fn constant_lift() {
        let k = DualC::constant(re(5.0));
        assert_eq!(k.val, re(5.0));
        assert!(k.der.is_zero());
    }

    #[test]
    fn quotient_simplifies() {
        let e = DualC::variable(re(2.0));
        let q = (&e * &e).checked_div(&e).unwrap();
        assert_eq!(q.val, re(2.0));
        assert_eq!(q.der, re(1.0));
    }

    #[test]
    fn quotient_by_zero_value_errors() {
        let e = DualC::variable(re(0.0));
        assert!(DualC::constant(re(1.0)).checked_div(&e).is_err());
        assert!(e.recip().is_err());
    }

    #[test]
    fn reciprocal_rule() {
        let e = DualC::variable(CNum::from_f64(&ctx(), 0.0, 2.0));
        let r = e.recip().unwrap();
        // d(1/x)/dx = -1/x² = -1/(-4) = 1/4
        assert_eq!(r.der, re(0.25));
        assert_eq!(r.val, CNum::from_f64(&ctx(), 0.0, -0.5));
    }
}
