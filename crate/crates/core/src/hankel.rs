//! Hankel determinants `H_D^d(ε) = det[f_{i+j+d−1}]_{i,j=1..D}` and their
//! energy derivatives.

use std::cmp::Ordering;

use rug::Float;

use crate::error::{param, Result};
use crate::mpnum::{DualC, PrecisionCtx};
use crate::riccati::TaylorSeries;

/// Dimension `D ≥ 2` and displacement `d ≥ 0` of a Hankel determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HankelSpec {
    dim: usize,
    shift: usize,
}

impl HankelSpec {
    pub fn new(dim: usize, shift: usize) -> Result<Self> {
        if dim < 2 {
            return param(format!("Hankel dimension must be at least 2, got {dim}"));
        }
        Ok(Self { dim, shift })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// Series order needed: `2D + d − 1`.
    pub fn required_order(&self) -> usize {
        2 * self.dim + self.shift - 1
    }
}

/// A determinant and its ε-derivative, stored as `value · 2^log_scale`.
#[derive(Clone, Debug)]
pub struct HankelValue {
    pub spec: HankelSpec,
    pub value: DualC,
    pub log_scale: i64,
    /// A pivot column was exactly zero at working precision.
    pub singular: bool,
    /// `Π_i max_j (|Re M_ij| + |Im M_ij|)`: bounds every term of the
    /// permutation expansion, used as the reference size for residuals.
    pub term_bound: Float,
}

impl HankelValue {
    /// `|det| / term_bound`; zero when singular.
    pub fn relative_residual(&self) -> Float {
        let prec = self.value.prec();
        if self.singular || self.term_bound.is_zero() {
            return Float::new(prec);
        }
        let abs = self.value.val.abs() << clamp_exp(self.log_scale);
        Float::with_val(prec, abs / &self.term_bound)
    }

    /// The determinant `value · 2^log_scale` as a plain dual number.
    pub fn unscaled(&self) -> DualC {
        self.value.mul_pow2(clamp_exp(self.log_scale))
    }
}

fn clamp_exp(e: i64) -> i32 {
    e.clamp(i32::MIN as i64 / 2, i32::MAX as i64 / 2) as i32
}

/// `M[i][j] = f_{i+j+d−1}` with `i, j = 1..D` (stored 0-based).
pub fn hankel_matrix(series: &TaylorSeries, spec: HankelSpec) -> Result<Vec<Vec<DualC>>> {
    if series.order() < spec.required_order() {
        return param(format!(
            "series order {} is below the {} needed for D={}, d={}",
            series.order(),
            spec.required_order(),
            spec.dim,
            spec.shift
        ));
    }
    let f = series.coeffs();
    let matrix = (0..spec.dim)
        .map(|i| {
            // 1-based index i+j+d+1 maps to slice index i+j+d
            (0..spec.dim)
                .map(|j| f[i + j + spec.shift].clone())
                .collect()
        })
        .collect();
    Ok(matrix)
}

/// Determinant by LU elimination with partial pivoting on `|re| + |im|`.
///
/// The derivative rides along in dual arithmetic. After each pivot the
/// running product is renormalized by a power of two, which is accumulated
/// in `log_scale`. A column with no nonzero pivot yields `value = 0` and
/// `singular = true`.
pub fn hankel_det(
    series: &TaylorSeries,
    spec: HankelSpec,
    ctx: &PrecisionCtx,
) -> Result<HankelValue> {
    let mut m = hankel_matrix(series, spec)?;
    let prec = ctx.mantissa_bits();
    let n = spec.dim;

    let mut term_bound = Float::with_val(prec, 1);
    for row in &m {
        let max = row
            .iter()
            .map(|x| x.val.norm_l1())
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
            .expect("non-empty row");
        term_bound *= max;
    }

    let mut det = DualC::constant(crate::mpnum::CNum::one(ctx));
    let mut log_scale: i64 = 0;

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, m[r][col].val.norm_l1()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .expect("non-empty column");
        if pivot_mag.is_zero() {
            return Ok(HankelValue {
                spec,
                value: DualC::zero(ctx),
                log_scale: 0,
                singular: true,
                term_bound,
            });
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = &det * &pivot;
        if let Some(e) = det.val.max_exp() {
            det = det.mul_pow2(-e);
            log_scale += e as i64;
        }

        let inv = pivot.recip()?;
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let factor = &row[col] * &inv;
            for k in col + 1..n {
                let update = &factor * &pivot_row[k];
                row[k] = &row[k] - &update;
            }
        }
    }

    Ok(HankelValue {
        spec,
        value: det,
        log_scale,
        singular: false,
        term_bound,
    })
}
