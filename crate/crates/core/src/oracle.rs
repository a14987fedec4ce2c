//! Exact eigenvalues from zeros of `J_ν(2√(−λ))` in the order `ν`.
//!
//! With `z = 2√(−λ) = 2i√λ`,
//!
//! ```text
//! J_ν(z) = (z/2)^ν / Γ(ν+1) · S(ν),   S(ν) = Σ_{k≥0} c_k,
//! c_0 = 1,   c_k = c_{k−1} · λ / (k (ν + k)).
//! ```
//!
//! `(z/2)^ν` never vanishes and `1/Γ(ν+1)` only vanishes at the negative
//! integers, where `S` has its poles, so the zeros of `S` are exactly the
//! zeros of `J_ν(z)` and no complex gamma function is needed. The energy is
//! `ε = −ν²/4`.
//!
//! The tabulated poles of the scattering amplitude sit at zeros with
//! `Re(ν) < 0` (equivalently `J_{−μ}(z) = 0` with `μ = 2√(−ε)`, `Re(μ) > 0`).
//! That half-plane is the admissible one here. Roots are reported on the
//! branch `Im(ν) ≥ 0`, i.e. `Im(ε) ≥ 0`; the mirror root is the complex
//! conjugate.

use rug::Float;

use crate::error::{param, Error, Result};
use crate::mpnum::{CNum, DualC, PrecisionCtx};
use crate::rpm::{newton_iterate, Evaluation, NewtonConfig};

/// Bits of headroom kept on top of the estimated cancellation.
const EXTRA_GUARD_BITS: u32 = 32;
/// Distance from a negative integer below which `S(ν)` is not evaluated.
const POLE_EXCLUSION: f64 = 1e-10;
const MAX_TERMS: usize = 1_000_000;
/// Working precision of the coarse discovery grid (before guard bits).
const DISCOVERY_BITS: u32 = 128;
/// Columns scanned beyond the best zero before discovery stops.
const SWEEP_MARGIN: f64 = 2.0;

/// `S(ν)` with `∂S/∂ν` and truncation diagnostics.
#[derive(Clone, Debug)]
pub struct BesselSeries {
    /// Value and ν-derivative, rounded to the caller's precision.
    pub value: DualC,
    /// Number of terms summed (`c_0..c_{terms−1}`).
    pub terms: usize,
    /// Largest `|c_k|`; the sum cancels down from this size near a zero.
    pub max_term: Float,
    /// Guard bits added to the caller's precision for the summation.
    pub guard_bits: u32,
}

impl BesselSeries {
    /// `|S| / max_term`.
    pub fn relative_residual(&self) -> Float {
        let prec = self.value.prec();
        Float::with_val(prec, self.value.val.abs() / &self.max_term)
    }
}

/// `log2 max_k |c_k|` estimated in double precision.
fn log2_max_term(nu: (f64, f64), lambda: f64) -> f64 {
    let (a, b) = nu;
    let ln_lambda = lambda.ln();
    let nu_abs = a.hypot(b);
    let mut log_c = 0.0f64;
    let mut best = 0.0f64;
    let mut k = 1.0f64;
    loop {
        let den = k * (a + k).hypot(b);
        let step = ln_lambda - den.ln();
        log_c += step;
        best = best.max(log_c);
        if k > nu_abs + 1.0 && step < -0.7 {
            break;
        }
        k += 1.0;
        if k > MAX_TERMS as f64 {
            break;
        }
    }
    best / std::f64::consts::LN_2
}

fn check_order(nu: &CNum) -> Result<()> {
    let (a, b) = nu.to_f64_pair();
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("Bessel order must be finite".into()));
    }
    if a < 0.0 {
        let nearest = a.round();
        if nearest <= -1.0 && (a - nearest).hypot(b) < POLE_EXCLUSION {
            return Err(Error::Domain(format!(
                "order {a}{b:+}i is within {POLE_EXCLUSION:e} of the pole at {nearest}"
            )));
        }
    }
    Ok(())
}

/// Gamma-free normalized Bessel series `S(ν)`; `nu.der` seeds the derivative.
///
/// The sum is accumulated with enough guard bits to absorb the cancellation
/// from the largest term, and stops once three consecutive terms fall below
/// `2^{−p}` times the larger of the partial sum and the largest term, where
/// `p` is the summation precision.
pub fn reduced_bessel(nu: &DualC, lambda: &Float, ctx: &PrecisionCtx) -> Result<BesselSeries> {
    if !(lambda.is_finite() && *lambda > 0) {
        return param("lambda must be positive");
    }
    check_order(&nu.val)?;

    let guard = log2_max_term(nu.val.to_f64_pair(), lambda.to_f64())
        .max(0.0)
        .ceil() as u32
        + EXTRA_GUARD_BITS;
    let work = ctx.mantissa_bits() + guard;
    let wctx = ctx.widened(guard);
    let nu_w = nu.with_prec(work);
    let lambda_w = Float::with_val(work, lambda);
    let nu_scale = nu.val.abs().to_f64();
    let tiny = wctx.pow2(-(work as i32));

    let mut term = DualC::constant(CNum::one(&wctx));
    let mut sum = term.clone();
    let mut max_term = Float::with_val(work, 1);
    let mut small_run = 0;
    let mut k: usize = 1;
    while small_run < 3 {
        if k > MAX_TERMS {
            return Err(Error::Domain(format!(
                "Bessel series did not settle within {MAX_TERMS} terms"
            )));
        }
        let shifted = nu_w.add_real(&wctx.int(k as i64));
        let ratio = shifted.recip()?.mul_real(&lambda_w).div_int(k as i64)?;
        term = &term * &ratio;
        sum = &sum + &term;

        let size = term.val.abs();
        if size > max_term {
            max_term = size.clone();
        }
        let reference = sum.val.abs().max(&max_term);
        if (k as f64) > nu_scale + 1.0 && size <= Float::with_val(work, &tiny * &reference) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        k += 1;
    }

    Ok(BesselSeries {
        value: sum.with_prec(ctx.mantissa_bits()),
        terms: k,
        max_term: Float::with_val(ctx.mantissa_bits(), &max_term),
        guard_bits: guard,
    })
}

/// `ε = −ν²/4`.
pub fn epsilon_from_nu(nu: &CNum) -> CNum {
    (-&nu.square()).mul_pow2(-2)
}

/// Order on the admissible side: `ν = −2√(−ε)` (principal root), so
/// `Re(ν) ≤ 0`.
pub fn nu_from_epsilon(epsilon: &CNum) -> CNum {
    (-&(-epsilon).sqrt()).mul_int(2)
}

/// Outcome of a zero search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStatus {
    Converged,
    /// Newton converged, but to a zero with `Re(ν) ≥ 0`.
    Inadmissible,
    NotConverged,
    /// No seed was available (discovery found nothing).
    NotFound,
}

/// A zero of `S(ν)` and its eigenvalue.
#[derive(Clone, Debug)]
pub struct OracleRoot {
    pub lambda: Float,
    pub nu: CNum,
    pub epsilon: CNum,
    /// `|S(ν)| / max_k |c_k|` at the reported order.
    pub residual: Float,
    pub iterations: usize,
    pub status: RootStatus,
}

impl OracleRoot {
    pub fn is_converged(&self) -> bool {
        self.status == RootStatus::Converged
    }

    pub fn is_admissible(&self) -> bool {
        self.nu.re().is_sign_negative() && !self.nu.re().is_zero()
    }

    /// `|Im ε| < tol`.
    pub fn is_real(&self, tol: &Float) -> bool {
        Float::with_val(self.epsilon.prec(), self.epsilon.im().abs_ref()) < *tol
    }

    fn not_found(lambda: &Float, ctx: &PrecisionCtx) -> Self {
        let nan = Float::with_val(ctx.mantissa_bits(), rug::float::Special::Nan);
        let z = CNum::new(nan.clone(), nan.clone());
        Self {
            lambda: lambda.clone(),
            nu: z.clone(),
            epsilon: z,
            residual: nan,
            iterations: 0,
            status: RootStatus::NotFound,
        }
    }
}

fn oracle_noise_floor(ctx: &PrecisionCtx) -> Float {
    ctx.pow2(-((ctx.mantissa_bits() / 2) as i32))
}

/// Newton in `ν` on `S(ν)`, starting from `nu_seed` with `Re(nu_seed) < 0`.
pub fn exact_eigenvalue(
    lambda: &Float,
    nu_seed: &CNum,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<OracleRoot> {
    cfg.validate(ctx)?;
    if !(lambda.is_finite() && *lambda > 0) {
        return param("lambda must be positive");
    }
    if !(nu_seed.is_finite() && nu_seed.re().is_sign_negative() && !nu_seed.re().is_zero()) {
        return param("seed order must satisfy Re(nu) < 0");
    }
    let start = nu_seed.with_prec(ctx.mantissa_bits());
    let floor = oracle_noise_floor(ctx);
    let bound = search_radius(lambda.to_f64()) + 2.0 * start.abs().to_f64();
    let outcome = newton_iterate(&start, cfg, &floor, |nu| {
        if nu.abs().to_f64() > bound {
            return Err(Error::Domain("Newton left the search disc".into()));
        }
        let s = reduced_bessel(&DualC::variable(nu.clone()), lambda, ctx)?;
        Ok(Evaluation {
            residual: s.relative_residual(),
            exact_zero: s.value.val.is_zero(),
            value: s.value.val,
            derivative: s.value.der,
        })
    });
    // Newton can wander onto a pole; that is a failed search, not a caller
    // error, and the seed is reported back.
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Domain(_)) => {
            return Ok(OracleRoot {
                lambda: lambda.clone(),
                epsilon: epsilon_from_nu(&start),
                nu: start,
                residual: Float::with_val(ctx.mantissa_bits(), rug::float::Special::Infinity),
                iterations: 0,
                status: RootStatus::NotConverged,
            });
        }
        Err(e) => return Err(e),
    };

    let mut nu = outcome.root;
    if nu.im().is_sign_negative() {
        nu = nu.conj();
    }
    // a real zero approached from off the axis keeps a residual imaginary part
    if Float::with_val(nu.prec(), nu.im().abs_ref())
        <= Float::with_val(nu.prec(), &floor * nu.abs())
    {
        let re = nu.re().clone();
        nu = CNum::new(re, Float::new(ctx.mantissa_bits()));
    }
    let status = if !outcome.converged {
        RootStatus::NotConverged
    } else if nu.re().is_sign_negative() && !nu.re().is_zero() {
        RootStatus::Converged
    } else {
        RootStatus::Inadmissible
    };
    Ok(OracleRoot {
        lambda: lambda.clone(),
        epsilon: epsilon_from_nu(&nu),
        nu,
        residual: outcome.residual,
        iterations: outcome.iterations,
        status,
    })
}

/// Coarse search for the leading admissible zero: the one with the largest
/// `Re(ν) < 0` on the branch `Im(ν) ≥ 0`.
///
/// `|S|` is sampled at the half-integer nodes of `Re(ν) ∈ [−R, 0)`,
/// `Im(ν) ∈ (0, R)` with `R = 2√λ + 10`, and Newton is started from every
/// local minimum. Nodes stay off the real axis so a real start cannot trap
/// the iteration there; real zeros are bracketed separately by sign changes
/// between neighbouring poles. Columns are swept from `Re(ν) = 0` leftwards
/// and the sweep stops [`SWEEP_MARGIN`] units past the best zero found.
/// The returned order is polished only to discovery precision.
pub fn discover_seed(lambda: &Float, ctx: &PrecisionCtx) -> Result<Option<CNum>> {
    if !(lambda.is_finite() && *lambda > 0) {
        return param("lambda must be positive");
    }
    let dctx = PrecisionCtx::with_bits(DISCOVERY_BITS.min(ctx.mantissa_bits()))?;
    let radius = search_radius(lambda.to_f64());
    let n = radius.ceil() as usize;
    let lambda_d = dctx.round(lambda);
    let mut cfg = NewtonConfig::for_ctx(&dctx);
    cfg.max_iter = 60;

    let node = |a: usize, b: usize| CNum::from_f64(&dctx, -0.5 - a as f64, 0.5 + b as f64);
    let column = |a: usize| -> Result<Vec<f64>> {
        (0..n)
            .map(|b| {
                let s = reduced_bessel(&DualC::constant(node(a, b)), &lambda_d, &dctx)?;
                Ok(s.value.val.abs().log2().to_f64())
            })
            .collect()
    };

    let mut best: Option<CNum> = None;
    let consider = |start: &CNum, best: &mut Option<CNum>| -> Result<()> {
        let root = exact_eigenvalue(&lambda_d, start, &cfg, &dctx)?;
        if root.is_converged() && best.as_ref().is_none_or(|prev| root.nu.re() > prev.re()) {
            *best = Some(root.nu);
        }
        Ok(())
    };

    // columns a-1, a, a+1 of log|S|; a local minimum in column a needs all three
    let mut left: Option<Vec<f64>> = None;
    let mut mid = column(0)?;
    for a in 0..n {
        let right = if a + 1 < n {
            Some(column(a + 1)?)
        } else {
            None
        };
        for b in 0..n {
            let here = mid[b];
            let rows = b.saturating_sub(1)..(b + 2).min(n);
            let is_min = [left.as_ref(), Some(&mid), right.as_ref()]
                .into_iter()
                .flatten()
                .all(|col| rows.clone().all(|y| col[y] >= here));
            if is_min {
                consider(&node(a, b), &mut best)?;
            }
        }
        for start in real_brackets(&lambda_d, a, &dctx)? {
            consider(&start, &mut best)?;
        }
        if let Some(b) = &best {
            if b.re().to_f64() > -(a as f64) - 1.0 + SWEEP_MARGIN {
                break;
            }
        }
        left = Some(mid);
        match right {
            Some(r) => mid = r,
            None => break,
        }
    }
    Ok(best)
}

/// Midpoints of sign changes of `S` on the real interval `(−cell−1, −cell)`.
/// Real zeros pinched between two poles have no isolated minimum of `|S|` on
/// the off-axis grid.
fn real_brackets(lambda: &Float, cell: usize, ctx: &PrecisionCtx) -> Result<Vec<CNum>> {
    const PER_UNIT: usize = 16;
    let mut out = Vec::new();
    let mut prev: Option<(f64, bool)> = None;
    // sampled away from the poles at both ends
    for i in 1..PER_UNIT {
        let x = -(cell as f64) - i as f64 / PER_UNIT as f64;
        let s = reduced_bessel(&DualC::constant(CNum::from_f64(ctx, x, 0.0)), lambda, ctx)?;
        let negative = s.value.val.re().is_sign_negative();
        if let Some((px, pn)) = prev {
            if pn != negative {
                out.push(CNum::from_f64(ctx, 0.5 * (px + x), 0.0));
            }
        }
        prev = Some((x, negative));
    }
    Ok(out)
}

/// Half-width of the region where zeros are sought: `2√λ + 10`.
fn search_radius(lambda: f64) -> f64 {
    2.0 * lambda.sqrt() + 10.0
}

/// Exact eigenvalue for `λ`, discovering a seed when none is supplied.
pub fn exact_for_lambda(
    lambda: &Float,
    nu_seed: Option<&CNum>,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<OracleRoot> {
    let seed = match nu_seed {
        Some(s) => Some(s.clone()),
        None => discover_seed(lambda, ctx)?,
    };
    match seed {
        Some(s) => exact_eigenvalue(lambda, &s, cfg, ctx),
        None => Ok(OracleRoot::not_found(lambda, ctx)),
    }
}

/// Follows one branch of zeros across an ascending `λ` grid.
///
/// With `continuation`, each converged order seeds the next grid point;
/// otherwise, or when the continued Newton run fails, the point is seeded by
/// [`discover_seed`]. Failures are reported per point and the scan carries on.
pub fn oracle_scan(
    lambda_grid: &[Float],
    nu_seed: Option<&CNum>,
    continuation: bool,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<Vec<OracleRoot>> {
    if lambda_grid.is_empty() {
        return param("lambda grid is empty");
    }
    if lambda_grid.windows(2).any(|w| w[1] < w[0]) {
        return param("lambda grid must be sorted ascending");
    }
    if lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0)) {
        return param("every lambda must be positive");
    }

    let mut out = Vec::with_capacity(lambda_grid.len());
    let mut carry: Option<CNum> = nu_seed.cloned();
    for lambda in lambda_grid {
        let mut root = exact_for_lambda(lambda, carry.as_ref(), cfg, ctx)?;
        if carry.is_some() && !root.is_converged() {
            root = exact_for_lambda(lambda, None, cfg, ctx)?;
        }
        carry = if continuation && root.is_converged() {
            Some(root.nu.clone())
        } else {
            None
        };
        out.push(root);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(192).unwrap()
    }

    #[test]
    fn vanishing_lambda_gives_unity() {
        let ctx = ctx();
        let nu = DualC::variable(CNum::from_f64(&ctx, 1.5, 0.5));
        let s = reduced_bessel(&nu, &ctx.real(1e-30), &ctx).unwrap();
        let dev = s.value.val.sub_real(&ctx.int(1)).abs();
        assert!(dev < 1e-29);
    }

    #[test]
    fn poles_are_domain_errors() {
        let ctx = ctx();
        let lam = ctx.real(1.0);
        for p in [-1.0, -2.0, -7.0] {
            let nu = DualC::variable(CNum::from_f64(&ctx, p + 1e-12, 0.0));
            assert!(matches!(
                reduced_bessel(&nu, &lam, &ctx),
                Err(Error::Domain(_))
            ));
        }
        // zero and positive integers are regular points of the recurrence
        let nu = DualC::variable(CNum::zero(&ctx));
        assert!(reduced_bessel(&nu, &lam, &ctx).is_ok());
        assert!(reduced_bessel(&nu, &ctx.real(-1.0), &ctx).is_err());
    }

    #[test]
    fn mapping_round_trip() {
        let ctx = ctx();
        let eps = CNum::parse(
            &ctx,
            "-0.7398591041595960979747",
            "0.2452751136305201056811",
        )
        .unwrap();
        let nu = nu_from_epsilon(&eps);
        assert!(nu.re().is_sign_negative());
        assert!(nu.im().is_sign_positive());
        let back = epsilon_from_nu(&nu);
        assert!((&back - &eps).abs() < ctx.pow2(-185));
    }

    #[test]
    fn seed_half_plane_enforced() {
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let seed = CNum::from_f64(&ctx, 1.7, 0.3);
        assert!(exact_eigenvalue(&ctx.real(0.5), &seed, &cfg, &ctx).is_err());
    }

    #[test]
    fn scan_argument_checks() {
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        assert!(oracle_scan(&[], None, true, &cfg, &ctx).is_err());
        let grid = [ctx.real(2.0), ctx.real(0.5)];
        assert!(oracle_scan(&grid, None, true, &cfg, &ctx).is_err());
    }

    #[test]
    fn guard_grows_with_lambda() {
        let ctx = ctx();
        let nu = DualC::variable(CNum::from_f64(&ctx, -8.2, 129.2));
        let small = reduced_bessel(&nu, &ctx.real(2.0), &ctx).unwrap();
        let large = reduced_bessel(&nu, &ctx.real(4489.0), &ctx).unwrap();
        assert!(large.guard_bits >= small.guard_bits);
        assert!(large.terms > small.terms);
    }

    #[test]
    fn discovers_leading_complex_zero() {
        let ctx = ctx();
        let nu = discover_seed(&ctx.real(0.5), &ctx).unwrap().unwrap();
        let (a, b) = nu.to_f64_pair();
        assert!((a + 1.743166615).abs() < 1e-8 && (b - 0.281413276).abs() < 1e-8);
    }

    #[test]
    fn discovers_largest_real_zero() {
        // two real zeros near -1.659 and -1.734 at this strength
        let ctx = ctx();
        let lam = ctx.parse_real("0.4").unwrap();
        let nu = discover_seed(&lam, &ctx).unwrap().unwrap();
        assert!(nu.im().is_zero());
        assert!((nu.re().to_f64() + 1.658779989).abs() < 1e-8);
    }

    #[test]
    fn scan_recovers_after_branch_loss() {
        // the real branch at 0.4 does not continue to 0.5
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let grid = [
            ctx.parse_real("0.4").unwrap(),
            ctx.parse_real("0.5").unwrap(),
        ];
        let roots = oracle_scan(&grid, None, true, &cfg, &ctx).unwrap();
        assert!(roots.iter().all(OracleRoot::is_converged));
        assert!(roots[0].nu.im().is_zero());
        assert!((roots[1].nu.im().to_f64() - 0.281413276).abs() < 1e-8);
    }
}
