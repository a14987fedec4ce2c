//! Roots `ε^{[D,d]}` of `H_D^d(ε) = 0` and their D-indexed sequences.
//!
//! Roots are found by damped complex Newton iteration with the derivative
//! supplied by dual arithmetic. A sequence climbs a ladder of dimensions
//! starting at `D = 2`, each root seeding the next dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::error::{param, Result};
use crate::hankel::{hankel_det, HankelSpec, HankelValue};
use crate::mpnum::{CNum, PrecisionCtx};
use crate::riccati::{taylor_coefficients, ModelParams};

const MAX_RESTARTS: usize = 3;
const RESTART_SEED: u64 = 0x05ee_d0f5_ca1e;

/// Stopping rule and damping for the Newton iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonConfig {
    /// Stop when `|Δε| <= tol · |ε|`.
    pub tol: Float,
    pub max_iter: usize,
    /// Step multiplier applied when the residual failed to decrease.
    pub damping: f64,
}

impl NewtonConfig {
    /// `tol = 2^(-bits/2)`, 100 iterations, damping 0.5.
    pub fn for_ctx(ctx: &PrecisionCtx) -> Self {
        Self {
            tol: ctx.pow2(-((ctx.mantissa_bits() / 2) as i32)),
            max_iter: 100,
            damping: 0.5,
        }
    }

    pub fn validate(&self, ctx: &PrecisionCtx) -> Result<()> {
        let floor = ctx.pow2(8 - ctx.mantissa_bits() as i32);
        if !self.tol.is_finite() || self.tol < floor {
            return param(format!(
                "tol must be at least 2^{}",
                8 - ctx.mantissa_bits() as i64
            ));
        }
        if self.max_iter == 0 {
            return param("max_iter must be positive");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return param(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        Ok(())
    }

    /// Two roots closer than this (relative) are the same root.
    pub fn dedup_tol(&self) -> Float {
        Float::with_val(self.tol.prec(), &self.tol * 1000u32)
    }
}

/// One Newton evaluation of an analytic function.
pub(crate) struct Evaluation {
    pub value: CNum,
    pub derivative: CNum,
    /// Scale-free size of `value`, compared against the noise floor.
    pub residual: Float,
    pub exact_zero: bool,
}

pub(crate) struct NewtonOutcome {
    pub root: CNum,
    pub residual: Float,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// Damped Newton with random-direction restarts on a vanishing derivative.
///
/// Converged means the relative step fell below `cfg.tol` (or stagnated at
/// the noise level below `sqrt(tol)`) and the residual at the final iterate
/// is at most `noise_floor`.
pub(crate) fn newton_iterate<F>(
    start: &CNum,
    cfg: &NewtonConfig,
    noise_floor: &Float,
    mut eval: F,
) -> Result<NewtonOutcome>
where
    F: FnMut(&CNum) -> Result<Evaluation>,
{
    let prec = start.prec();
    let sqrt_tol = Float::with_val(prec, cfg.tol.sqrt_ref());
    let damping = Float::with_val(prec, cfg.damping);
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut iterations = 0;
    let mut x = start.clone();
    let mut restarts = 0;

    for restart in 0..=MAX_RESTARTS {
        restarts = restart;
        if restart > 0 {
            x = perturb(start, &mut rng);
        }
        let mut prev_residual: Option<Float> = None;
        let mut prev_step: Option<Float> = None;
        let mut need_restart = false;

        for _ in 0..cfg.max_iter {
            iterations += 1;
            let ev = eval(&x)?;
            if ev.exact_zero {
                return Ok(NewtonOutcome {
                    root: x,
                    residual: Float::new(prec),
                    iterations,
                    restarts: restart,
                    converged: true,
                });
            }
            if ev.derivative.is_zero() || !ev.derivative.is_finite() {
                need_restart = true;
                break;
            }
            let mut step = ev.value.checked_div(&ev.derivative)?;
            if prev_residual.as_ref().is_some_and(|p| ev.residual >= *p) {
                step = step.mul_real(&damping);
            }
            x = &x - &step;
            if !x.is_finite() {
                need_restart = true;
                break;
            }
            let step_size = step.abs();
            let scale = x.abs();
            let small = step_size <= Float::with_val(prec, &cfg.tol * &scale);
            let stalled = prev_step.as_ref().is_some_and(|p| step_size >= *p)
                && step_size <= Float::with_val(prec, &sqrt_tol * &scale);
            if small || stalled {
                let last = eval(&x)?;
                let residual = if last.exact_zero {
                    Float::new(prec)
                } else {
                    last.residual
                };
                let converged = residual <= *noise_floor;
                return Ok(NewtonOutcome {
                    root: x,
                    residual,
                    iterations,
                    restarts: restart,
                    converged,
                });
            }
            prev_residual = Some(ev.residual);
            prev_step = Some(step_size);
        }

        if !need_restart {
            break;
        }
    }

    let residual = match eval(&x) {
        Ok(ev) if x.is_finite() => ev.residual,
        _ => Float::with_val(prec, rug::float::Special::Infinity),
    };
    Ok(NewtonOutcome {
        root: x,
        residual,
        iterations,
        restarts,
        converged: false,
    })
}

/// `start · (1 + 0.01 e^{iθ})`, or `0.01 e^{iθ}` when `start` is zero.
fn perturb(start: &CNum, rng: &mut ChaCha8Rng) -> CNum {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let prec = start.prec();
    let kick = CNum::new(
        Float::with_val(prec, 0.01 * theta.cos()),
        Float::with_val(prec, 0.01 * theta.sin()),
    );
    if start.is_zero() {
        kick
    } else {
        start + &(start * &kick)
    }
}

/// `H_D^d` and `∂H/∂ε` at one energy.
pub fn evaluate_hankel(
    lambda: &Float,
    spec: HankelSpec,
    epsilon: &CNum,
    ctx: &PrecisionCtx,
) -> Result<HankelValue> {
    let params = ModelParams::at_energy(ctx.round(lambda), epsilon.with_prec(ctx.mantissa_bits()))?;
    let series = taylor_coefficients(&params, spec.required_order(), ctx)?;
    hankel_det(&series, spec, ctx)
}

/// Largest relative determinant residual accepted as a root.
pub fn hankel_noise_floor(ctx: &PrecisionCtx) -> Float {
    ctx.pow2(-((ctx.mantissa_bits() / 2) as i32))
}

/// A Hankel root `ε^{[D,d]}`.
#[derive(Clone, Debug)]
pub struct RootResult {
    pub spec: HankelSpec,
    pub epsilon: CNum,
    /// `|H| / term_bound` at `epsilon`.
    pub residual: Float,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// Newton iteration for `H_D^d(ε) = 0` from `epsilon0`.
pub fn newton_root(
    lambda: &Float,
    shift: usize,
    dim: usize,
    epsilon0: &CNum,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<RootResult> {
    cfg.validate(ctx)?;
    if !(lambda.is_finite() && *lambda > 0) {
        return param("lambda must be positive");
    }
    if !epsilon0.is_finite() {
        return param("starting energy must be finite");
    }
    let spec = HankelSpec::new(dim, shift)?;
    let start = epsilon0.with_prec(ctx.mantissa_bits());
    let floor = hankel_noise_floor(ctx);
    let outcome = newton_iterate(&start, cfg, &floor, |eps| {
        let h = evaluate_hankel(lambda, spec, eps, ctx)?;
        Ok(Evaluation {
            residual: h.relative_residual(),
            exact_zero: h.singular || h.value.val.is_zero(),
            value: h.value.val,
            derivative: h.value.der,
        })
    })?;
    Ok(RootResult {
        spec,
        epsilon: outcome.root,
        residual: outcome.residual,
        iterations: outcome.iterations,
        restarts: outcome.restarts,
        converged: outcome.converged,
    })
}

/// Roots for `D = D_min..D_max` at fixed `λ` and `d`.
#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub lambda: Float,
    pub shift: usize,
    pub entries: Vec<RootResult>,
    /// `|ε^{[D]} − ε^{[D−1]}|` for consecutive entries (`entries.len() − 1`).
    pub deltas: Vec<Float>,
    /// Last converged entry.
    pub limit_estimate: Option<CNum>,
    pub convergent: bool,
}

impl SequenceReport {
    pub fn entry(&self, dim: usize) -> Option<&RootResult> {
        self.entries.iter().find(|r| r.spec.dim() == dim)
    }
}

/// Follows one Hankel root from `D = 2` up to `d_max`, reporting
/// `d_min..=d_max`.
///
/// Each dimension is seeded with the previous dimension's root (`seed` for
/// `D = 2`). Roots are folded onto the half-plane of the seed by complex
/// conjugation, which is exact because `H_D^d` has real coefficients for
/// real `λ`. When a non-real seed lands on a real root, that root is
/// reported but not used to seed the next dimension.
///
/// The sequence is flagged non-convergent when three consecutive entries
/// fail, or when the last delta exceeds the first delta of the final five
/// entries.
pub fn hankel_sequence(
    lambda: &Float,
    shift: usize,
    d_min: usize,
    d_max: usize,
    seed: &CNum,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<SequenceReport> {
    if d_min < 2 {
        return param(format!("D_min must be at least 2, got {d_min}"));
    }
    if d_max < d_min {
        return param(format!("D_max ({d_max}) is below D_min ({d_min})"));
    }
    cfg.validate(ctx)?;
    let prec = ctx.mantissa_bits();
    let seed = seed.with_prec(prec);
    let upper = seed.im().is_sign_positive();
    let real_cut = cfg.dedup_tol();
    let real_seed = is_real(&seed, &real_cut);

    let mut current = seed.clone();
    let mut entries = Vec::with_capacity(d_max - d_min + 1);
    for dim in 2..=d_max {
        let mut root = newton_root(lambda, shift, dim, &current, cfg, ctx)?;
        if root.epsilon.im().is_sign_positive() != upper && !root.epsilon.im().is_zero() {
            root.epsilon = root.epsilon.conj();
        }
        let collapsed = !real_seed && is_real(&root.epsilon, &real_cut);
        if root.converged && !collapsed {
            current = root.epsilon.clone();
        }
        if dim >= d_min {
            entries.push(root);
        }
    }

    let deltas: Vec<Float> = entries
        .windows(2)
        .map(|w| (&w[1].epsilon - &w[0].epsilon).abs())
        .collect();
    let limit_estimate = entries
        .iter()
        .rev()
        .find(|r| r.converged)
        .map(|r| r.epsilon.clone());

    let failed_run = entries.windows(3).any(|w| w.iter().all(|r| !r.converged));
    let growing = deltas.len() >= 4 && {
        let tail = &deltas[deltas.len() - 4..];
        tail[3] > tail[0]
    };
    let convergent = limit_estimate.is_some() && !failed_run && !growing;

    Ok(SequenceReport {
        lambda: lambda.clone(),
        shift,
        entries,
        deltas,
        limit_estimate,
        convergent,
    })
}

/// Starting energy for [`hankel_sequence`] taken from a reference energy.
///
/// `H_D^d` has real coefficients, so Newton started on the real axis stays
/// there. A (numerically) real reference is moved to
/// `ε + 0.05 i · max(1, |ε|)` to let the ladder reach complex roots.
pub fn complex_seed(reference: &CNum) -> CNum {
    let prec = reference.prec();
    let rel = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    if !is_real(reference, &rel) {
        return reference.clone();
    }
    let lift = Float::with_val(prec, reference.abs().max(&Float::with_val(prec, 1))) * 0.05f64;
    CNum::new(
        reference.re().clone(),
        Float::with_val(prec, reference.im() + lift),
    )
}

fn is_real(z: &CNum, rel: &Float) -> bool {
    let cut = Float::with_val(z.prec(), rel * z.abs());
    Float::with_val(z.prec(), z.im().abs_ref()) <= cut
}

/// A distinct root and how many seeds converged to it.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub root: RootResult,
    pub multiplicity: usize,
}

/// Multistart Newton from a `grid_n × grid_n` grid of seeds covering the
/// square of half-width `box_radius` around `box_center`.
///
/// Converged roots within `1000·tol` (relative) of each other are merged.
/// Clusters come back sorted by multiplicity, largest first, then by
/// distance to the centre.
#[allow(clippy::too_many_arguments)]
pub fn cluster_roots(
    lambda: &Float,
    shift: usize,
    dim: usize,
    box_center: &CNum,
    box_radius: &Float,
    grid_n: usize,
    cfg: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<Vec<RootCluster>> {
    if grid_n < 2 {
        return param(format!("grid_n must be at least 2, got {grid_n}"));
    }
    if box_radius.is_sign_negative() && !box_radius.is_zero() {
        return param("box_radius must be non-negative");
    }
    let prec = ctx.mantissa_bits();
    let center = box_center.with_prec(prec);
    let dedup = cfg.dedup_tol();
    let mut clusters: Vec<RootCluster> = Vec::new();

    for a in 0..grid_n {
        for b in 0..grid_n {
            let offset = |k: usize| {
                let t =
                    Float::with_val(prec, 2 * k as i64 - (grid_n as i64 - 1)) / (grid_n as u32 - 1);
                Float::with_val(prec, t * box_radius)
            };
            let seed = CNum::new(
                Float::with_val(prec, center.re() + offset(a)),
                Float::with_val(prec, center.im() + offset(b)),
            );
            let root = newton_root(lambda, shift, dim, &seed, cfg, ctx)?;
            if !root.converged {
                continue;
            }
            let scale = Float::with_val(prec, &dedup * root.epsilon.abs().max(&ctx.int(1)));
            match clusters
                .iter_mut()
                .find(|c| (&c.root.epsilon - &root.epsilon).abs() <= scale)
            {
                Some(c) => c.multiplicity += 1,
                None => clusters.push(RootCluster {
                    root,
                    multiplicity: 1,
                }),
            }
        }
    }

    clusters.sort_by(|x, y| {
        y.multiplicity.cmp(&x.multiplicity).then_with(|| {
            let dx = (&x.root.epsilon - &center).abs();
            let dy = (&y.root.epsilon - &center).abs();
            dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(clusters)
}

/// Largest pairwise distance among distinct roots lying within `radius` of
/// `center`; zero when fewer than two qualify.
pub fn cluster_spread(clusters: &[RootCluster], center: &CNum, radius: &Float) -> Float {
    let near: Vec<&CNum> = clusters
        .iter()
        .map(|c| &c.root.epsilon)
        .filter(|e| (*e - center).abs() <= *radius)
        .collect();
    let mut spread = Float::new(center.prec());
    for (i, a) in near.iter().enumerate() {
        for b in &near[i + 1..] {
            let d = (*a - *b).abs();
            if d > spread {
                spread = d;
            }
        }
    }
    spread
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(256).unwrap()
    }

    #[test]
    fn config_validation() {
        let ctx = ctx();
        let mut cfg = NewtonConfig::for_ctx(&ctx);
        assert!(cfg.validate(&ctx).is_ok());
        cfg.tol = ctx.pow2(-250);
        assert!(cfg.validate(&ctx).is_err());
        let mut cfg = NewtonConfig::for_ctx(&ctx);
        cfg.damping = 0.0;
        assert!(cfg.validate(&ctx).is_err());
        cfg.damping = 1.0;
        cfg.max_iter = 0;
        assert!(cfg.validate(&ctx).is_err());
    }

    #[test]
    fn sequence_argument_checks() {
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let seed = CNum::from_f64(&ctx, -0.7, 0.27);
        let lam = ctx.real(0.5);
        assert!(hankel_sequence(&lam, 0, 1, 4, &seed, &cfg, &ctx).is_err());
        assert!(hankel_sequence(&lam, 0, 5, 4, &seed, &cfg, &ctx).is_err());
    }

    #[test]
    fn newton_on_quadratic_restarts_from_flat_start() {
        // z² + 1 has z' = 0 at the origin: the driver must restart.
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let floor = ctx.pow2(-100);
        let start = CNum::zero(&ctx);
        let out = newton_iterate(&start, &cfg, &floor, |z| {
            let value = z.square().add_real(&ctx.int(1));
            Ok(Evaluation {
                residual: value.abs(),
                exact_zero: value.is_zero(),
                derivative: z.mul_int(2),
                value,
            })
        })
        .unwrap();
        assert!(out.converged);
        assert_eq!(out.restarts, 1);
        let err = out.root.square().add_real(&ctx.int(1)).abs();
        assert!(err < ctx.pow2(-200));
    }

    #[test]
    fn newton_reports_failure_in_band() {
        // e^z-like function without zeros: 1 + 0·z has derivative zero everywhere.
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let floor = ctx.pow2(-100);
        let out = newton_iterate(&CNum::one(&ctx), &cfg, &floor, |z| {
            Ok(Evaluation {
                value: CNum::one(&ctx),
                derivative: z.mul_int(0),
                residual: ctx.int(1),
                exact_zero: false,
            })
        })
        .unwrap();
        assert!(!out.converged);
    }

    #[test]
    fn degenerate_cluster_box() {
        let ctx = ctx();
        let cfg = NewtonConfig::for_ctx(&ctx);
        let lam = ctx.real(2.0);
        let center = CNum::from_f64(&ctx, -0.667, 1.621);
        let clusters = cluster_roots(&lam, 0, 4, &center, &ctx.zero(), 2, &cfg, &ctx).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].multiplicity, 4);
        assert!(cluster_roots(&lam, 0, 4, &center, &ctx.zero(), 1, &cfg, &ctx).is_err());
    }
}
