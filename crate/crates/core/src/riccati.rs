//! Taylor coefficients of the regularized logarithmic derivative.
//!
//! For `Φ'' + (ε − λe^{−q})Φ = 0` with `Φ(0) = 0`, the function
//! `f(q) = 1/q − Φ'(q)/Φ(q)` is regular at the origin and satisfies
//!
//! ```text
//! f'(q) + 2 f(q)/q − f(q)² + λ e^{−q} − ε = 0,      f(0) = 0.
//! ```
//!
//! Matching powers of `q` in `f = Σ_{j≥1} f_j q^j` gives, for `n ≥ 0`,
//!
//! ```text
//! (n + 3) f_{n+1} = C_n − λ (−1)^n / n! + ε δ_{n0},   C_n = Σ_{k=1}^{n−1} f_k f_{n−k}
//! ```
//!
//! so `f_1 = (ε − λ)/3`, `f_2 = λ/4`, `f_3 = (f_1² − λ/2)/5`, and so on. Every
//! coefficient is carried as a [`DualC`] holding `∂f_j/∂ε`.

use rug::Float;

use crate::error::{param, Result};
use crate::mpnum::{CNum, DualC, PrecisionCtx};

/// Potential strength and energy of the reduced problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    lambda: Float,
    epsilon: DualC,
}

impl ModelParams {
    /// `lambda` must be strictly positive (repulsive potential).
    pub fn new(lambda: Float, epsilon: DualC) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0 {
            return param(format!("lambda must be positive, got {}", lambda.to_f64()));
        }
        if !epsilon.val.is_finite() {
            return param("epsilon must be finite");
        }
        Ok(Self { lambda, epsilon })
    }

    /// Energy as the differentiation variable (`∂ε/∂ε = 1`).
    pub fn at_energy(lambda: Float, epsilon: CNum) -> Result<Self> {
        Self::new(lambda, DualC::variable(epsilon))
    }

    pub fn lambda(&self) -> &Float {
        &self.lambda
    }

    pub fn epsilon(&self) -> &DualC {
        &self.epsilon
    }
}

/// Coefficients `f_1..f_N`; `f_0 = 0` is implied and not stored.
#[derive(Clone, Debug)]
pub struct TaylorSeries {
    params: ModelParams,
    coeffs: Vec<DualC>,
}

impl TaylorSeries {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `f_j` for `1 <= j <= order`.
    pub fn coeff(&self, j: usize) -> Option<&DualC> {
        j.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    /// `[f_1, .., f_N]`.
    pub fn coeffs(&self) -> &[DualC] {
        &self.coeffs
    }

    /// Replaces `f_j` (1-based); used for mutation tests of the residual.
    pub fn with_coeff(mut self, j: usize, value: DualC) -> Self {
        self.coeffs[j - 1] = value;
        self
    }
}

/// Generates `f_1..f_order` at `ctx` precision.
pub fn taylor_coefficients(
    params: &ModelParams,
    order: usize,
    ctx: &PrecisionCtx,
) -> Result<TaylorSeries> {
    if order == 0 {
        return param("series order must be at least 1");
    }
    let prec = ctx.mantissa_bits();
    let eps = params.epsilon.with_prec(prec);
    // λ (−1)^n / n!, updated multiplicatively.
    let mut lambda_term = ctx.round(&params.lambda);
    let mut coeffs: Vec<DualC> = Vec::with_capacity(order);

    for n in 0..order {
        if n > 0 {
            lambda_term /= n as u32;
            lambda_term = -lambda_term;
        }
        let mut rhs = convolution(&coeffs, n, ctx);
        rhs = rhs.sub_real(&lambda_term);
        if n == 0 {
            rhs = &rhs + &eps;
        }
        coeffs.push(rhs.div_int(n as i64 + 3)?);
    }

    Ok(TaylorSeries {
        params: params.clone(),
        coeffs,
    })
}

/// `C_n = Σ_{k=1}^{n−1} f_k f_{n−k}` using the symmetry of the sum.
fn convolution(coeffs: &[DualC], n: usize, ctx: &PrecisionCtx) -> DualC {
    let mut acc = DualC::zero(ctx);
    if n < 2 {
        return acc;
    }
    let f = |j: usize| &coeffs[j - 1];
    for k in 1..=(n - 1) / 2 {
        acc = &acc + &(f(k) * f(n - k));
    }
    acc = acc.mul_int(2);
    if n.is_multiple_of(2) {
        acc = &acc + &f(n / 2).square();
    }
    acc
}

/// Left side of the Riccati equation evaluated with the truncated series at
/// `q`; vanishes to order `q^N` for a correct series of order `N`.
pub fn riccati_residual(series: &TaylorSeries, q: &Float) -> Result<CNum> {
    if !(q.is_finite() && *q > 0 && *q < 0.25) {
        return param(format!("q must lie in (0, 1/4), got {}", q.to_f64()));
    }
    let prec = series
        .coeffs
        .first()
        .map(|c| c.prec())
        .unwrap_or(q.prec())
        .max(q.prec());
    let q = Float::with_val(prec, q);

    // Horner for f(q)/q = Σ f_j q^{j−1} and f'(q) = Σ j f_j q^{j−1}.
    let zero = CNum::new(Float::new(prec), Float::new(prec));
    let mut f_over_q = zero.clone();
    let mut df = zero;
    for (idx, c) in series.coeffs.iter().enumerate().rev() {
        let j = idx as i64 + 1;
        f_over_q = &f_over_q.mul_real(&q) + &c.val;
        df = &df.mul_real(&q) + &c.val.mul_int(j);
    }
    let f = f_over_q.mul_real(&q);
    let exp_term = Float::with_val(prec, -&q).exp() * &series.params.lambda;

    let residual = &(&df + &f_over_q.mul_int(2)) - &f.square();
    let residual = residual.add_real(&exp_term);
    Ok(&residual - &series.params.epsilon.val.with_prec(prec))
}
