use rug::Float;
use serde_json::{Map, Value};

use super::output::{text_table, Cell};
use super::Lambda;
use crate::error::Result;
use crate::mpnum::{format_fixed, CNum, PrecisionCtx};
use crate::oracle::{exact_for_lambda, oracle_scan, OracleRoot, RootStatus};
use crate::rpm::{complex_seed, hankel_sequence, NewtonConfig, SequenceReport};

/// Result of one command: a text rendering plus flat records for CSV/JSON.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub text: String,
    pub records: Vec<Map<String, Value>>,
    /// Every row converged.
    pub complete: bool,
    /// Lines for the error stream.
    pub diagnostics: Vec<String>,
}

/// `0.1, 0.2, .., 5.0`.
pub fn default_scan_grid() -> Vec<String> {
    (1..=50).map(|k| format!("{}.{}", k / 10, k % 10)).collect()
}

fn fixed(x: &Float, ctx: &PrecisionCtx) -> String {
    format_fixed(x, ctx.display_digits())
}

fn sci(x: &Float) -> String {
    format!("{:.3e}", Float::with_val(64, x))
}

fn str_value(s: String) -> Value {
    Value::String(s)
}

struct Block {
    lambda: Lambda,
    report: Option<SequenceReport>,
    exact: OracleRoot,
}

/// Oracle root for `λ`, then the seeded Hankel ladder.
fn run_block(
    lambda: &Lambda,
    d: usize,
    d_min: usize,
    d_max: usize,
    seed: Option<&CNum>,
    ctx: &PrecisionCtx,
) -> Result<Block> {
    let cfg = NewtonConfig::for_ctx(ctx);
    let value = ctx.round(&lambda.value);
    let exact = exact_for_lambda(&value, None, &cfg, ctx)?;
    let seed = match seed {
        Some(s) => Some(s.clone()),
        None if exact.is_converged() => Some(complex_seed(&exact.epsilon)),
        None => None,
    };
    let report = match seed {
        Some(s) => Some(hankel_sequence(&value, d, d_min, d_max, &s, &cfg, ctx)?),
        None => None,
    };
    Ok(Block {
        lambda: lambda.clone(),
        report,
        exact,
    })
}

impl Block {
    fn complete(&self) -> bool {
        self.report
            .as_ref()
            .is_some_and(|r| r.convergent && r.entries.iter().all(|e| e.converged))
    }

    fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let l = &self.lambda.text;
        if !self.exact.is_converged() {
            out.push(format!(
                "lambda={l}: exact eigenvalue not found ({:?})",
                self.exact.status
            ));
        }
        match &self.report {
            None => out.push(format!(
                "lambda={l}: no starting energy for the Hankel sequence"
            )),
            Some(r) => {
                for e in r.entries.iter().filter(|e| !e.converged) {
                    out.push(format!("lambda={l}: D={} did not converge", e.spec.dim()));
                }
                if !r.convergent {
                    out.push(format!("lambda={l}: Hankel sequence is not convergent"));
                }
            }
        }
        out
    }

    fn rows(&self, with_exact: bool, ctx: &PrecisionCtx) -> Vec<(String, CNum, bool)> {
        let mut rows: Vec<(String, CNum, bool)> = self
            .report
            .iter()
            .flat_map(|r| r.entries.iter())
            .map(|e| (e.spec.dim().to_string(), e.epsilon.clone(), e.converged))
            .collect();
        if with_exact && self.exact.is_converged() {
            rows.push((
                "Exact".to_string(),
                self.exact.epsilon.with_prec(ctx.mantissa_bits()),
                true,
            ));
        }
        rows
    }

    fn text(&self, with_exact: bool, ctx: &PrecisionCtx) -> String {
        let mut lines = vec![vec![
            Cell::left("D"),
            Cell::right("Re eps"),
            Cell::right("Im eps"),
        ]];
        for (label, eps, converged) in self.rows(with_exact, ctx) {
            let mut line = vec![
                Cell::left(label),
                Cell::right(fixed(eps.re(), ctx)),
                Cell::right(fixed(eps.im(), ctx)),
            ];
            if !converged {
                line.push(Cell::left("converged=false"));
            }
            lines.push(line);
        }
        format!("lambda = {}\n{}", self.lambda.text, text_table(&lines))
    }

    fn records(&self, with_exact: bool, ctx: &PrecisionCtx) -> Vec<Map<String, Value>> {
        self.rows(with_exact, ctx)
            .into_iter()
            .map(|(label, eps, converged)| {
                let mut m = Map::new();
                m.insert("lambda".into(), str_value(self.lambda.text.clone()));
                m.insert("D".into(), str_value(label));
                m.insert("re_eps".into(), str_value(fixed(eps.re(), ctx)));
                m.insert("im_eps".into(), str_value(fixed(eps.im(), ctx)));
                m.insert("converged".into(), Value::Bool(converged));
                m
            })
            .collect()
    }
}

/// Hankel sequence for `D = d_min..d_max` with the exact row appended.
///
/// Without `seed`, the ladder starts from the exact eigenvalue (moved off
/// the real axis when it is real).
pub fn cmd_sequence(
    lambda: &Lambda,
    d: usize,
    d_min: usize,
    d_max: usize,
    seed: Option<&CNum>,
    ctx: &PrecisionCtx,
) -> Result<CommandOutput> {
    let block = run_block(lambda, d, d_min, d_max, seed, ctx)?;
    Ok(CommandOutput {
        text: block.text(true, ctx),
        records: block.records(true, ctx),
        complete: block.complete(),
        diagnostics: block.diagnostics(),
    })
}

/// Exact eigenvalue for one `λ`.
pub fn cmd_exact(
    lambda: &Lambda,
    nu_seed: Option<&CNum>,
    ctx: &PrecisionCtx,
) -> Result<CommandOutput> {
    let cfg = NewtonConfig::for_ctx(ctx);
    let root = exact_for_lambda(&ctx.round(&lambda.value), nu_seed, &cfg, ctx)?;
    let digits = ctx.display_digits();
    let status = match root.status {
        RootStatus::Converged => "converged",
        RootStatus::Inadmissible => "inadmissible",
        RootStatus::NotConverged => "not_converged",
        RootStatus::NotFound => "not_found",
    };

    let mut m = Map::new();
    m.insert("lambda".into(), str_value(lambda.text.clone()));
    m.insert("re_nu".into(), str_value(fixed(root.nu.re(), ctx)));
    m.insert("im_nu".into(), str_value(fixed(root.nu.im(), ctx)));
    m.insert("re_exact".into(), str_value(fixed(root.epsilon.re(), ctx)));
    m.insert("im_exact".into(), str_value(fixed(root.epsilon.im(), ctx)));
    m.insert("residual".into(), str_value(sci(&root.residual)));
    m.insert("iterations".into(), Value::from(root.iterations));
    m.insert("admissible".into(), Value::Bool(root.is_admissible()));
    m.insert("status".into(), str_value(status.into()));

    let text = format!(
        "lambda     = {}\nnu         = {:.digits$}\nepsilon    = {:.digits$}\nresidual   = {}\niterations = {}\nadmissible = {}\nstatus     = {status}\n",
        lambda.text,
        root.nu,
        root.epsilon,
        sci(&root.residual),
        root.iterations,
        root.is_admissible(),
    );
    let diagnostics = if root.is_converged() {
        Vec::new()
    } else {
        vec![format!("lambda={}: exact eigenvalue {status}", lambda.text)]
    };
    Ok(CommandOutput {
        text,
        records: vec![m],
        complete: root.is_converged(),
        diagnostics,
    })
}

/// Per-point outcome of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanStatus {
    Ok,
    RpmFailed,
    ExactFailed,
    BothFailed,
}

impl ScanStatus {
    fn as_str(self) -> &'static str {
        match self {
            ScanStatus::Ok => "ok",
            ScanStatus::RpmFailed => "rpm_failed",
            ScanStatus::ExactFailed => "exact_failed",
            ScanStatus::BothFailed => "both_failed",
        }
    }
}

/// RPM limit and exact eigenvalue at one `λ`.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub lambda: Lambda,
    pub eps_rpm: Option<CNum>,
    pub eps_exact: Option<CNum>,
    /// `log10 |Re ε_exact − Re ε_RPM|`.
    pub log10_err_re: Option<Float>,
    pub log10_err_im: Option<Float>,
    pub status: ScanStatus,
}

/// RPM limit at `D = d_max` against the exact eigenvalue over `grid`.
///
/// The oracle follows its branch by continuation in `λ`. The RPM ladder at
/// each point starts from that point's exact eigenvalue, or from the
/// previous RPM limit when the oracle failed.
pub fn cmd_scan(
    grid: &[Lambda],
    d: usize,
    d_max: usize,
    ctx: &PrecisionCtx,
) -> Result<CommandOutput> {
    let rows = scan_rows(grid, d, d_max, ctx)?;
    Ok(scan_output(&rows, ctx))
}

/// Rows behind [`cmd_scan`].
pub fn scan_rows(
    grid: &[Lambda],
    d: usize,
    d_max: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<ScanRow>> {
    let cfg = NewtonConfig::for_ctx(ctx);
    let values: Vec<Float> = grid.iter().map(|l| ctx.round(&l.value)).collect();
    let exact = oracle_scan(&values, None, true, &cfg, ctx)?;

    let mut rows = Vec::with_capacity(grid.len());
    let mut previous: Option<CNum> = None;
    for ((lambda, value), root) in grid.iter().zip(&values).zip(exact) {
        let eps_exact = root.is_converged().then(|| root.epsilon.clone());
        let seed = match &eps_exact {
            Some(e) => Some(complex_seed(e)),
            None => previous.clone(),
        };
        let eps_rpm = match seed {
            Some(s) => {
                let report = hankel_sequence(value, d, d_max, d_max, &s, &cfg, ctx)?;
                report
                    .entry(d_max)
                    .filter(|e| e.converged)
                    .map(|e| e.epsilon.clone())
            }
            None => None,
        };
        if eps_rpm.is_some() {
            previous = eps_rpm.clone();
        }

        let (log10_err_re, log10_err_im) = match (&eps_rpm, &eps_exact) {
            (Some(r), Some(e)) => {
                let diff = e - r;
                let log = |x: &Float| Float::with_val(ctx.mantissa_bits(), x.abs_ref()).log10();
                (Some(log(diff.re())), Some(log(diff.im())))
            }
            _ => (None, None),
        };
        let status = match (eps_rpm.is_some(), eps_exact.is_some()) {
            (true, true) => ScanStatus::Ok,
            (false, true) => ScanStatus::RpmFailed,
            (true, false) => ScanStatus::ExactFailed,
            (false, false) => ScanStatus::BothFailed,
        };
        rows.push(ScanRow {
            lambda: lambda.clone(),
            eps_rpm,
            eps_exact,
            log10_err_re,
            log10_err_im,
            status,
        });
    }
    Ok(rows)
}

const SCAN_COLUMNS: [&str; 7] = [
    "lambda",
    "re_rpm",
    "im_rpm",
    "re_exact",
    "im_exact",
    "log10_err_re",
    "log10_err_im",
];

fn scan_output(rows: &[ScanRow], ctx: &PrecisionCtx) -> CommandOutput {
    // the status column only appears when some point failed
    let complete = rows.iter().all(|r| r.status == ScanStatus::Ok);
    let opt = |x: Option<&Float>| x.map(|v| fixed(v, ctx));

    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let values = [
            Some(row.lambda.text.clone()),
            opt(row.eps_rpm.as_ref().map(|z| z.re())),
            opt(row.eps_rpm.as_ref().map(|z| z.im())),
            opt(row.eps_exact.as_ref().map(|z| z.re())),
            opt(row.eps_exact.as_ref().map(|z| z.im())),
            opt(row.log10_err_re.as_ref()),
            opt(row.log10_err_im.as_ref()),
        ];
        let mut m = Map::new();
        for (key, v) in SCAN_COLUMNS.iter().zip(values) {
            m.insert((*key).into(), v.map_or(Value::Null, Value::String));
        }
        if !complete {
            m.insert("status".into(), str_value(row.status.as_str().into()));
        }
        records.push(m);
    }

    let mut header: Vec<Cell> = SCAN_COLUMNS.iter().map(|c| Cell::right(*c)).collect();
    if !complete {
        header.push(Cell::left("status"));
    }
    let mut lines = vec![header];
    for m in &records {
        lines.push(
            m.values()
                .map(|v| match v {
                    Value::String(s) => Cell::right(s.clone()),
                    _ => Cell::right("-"),
                })
                .collect(),
        );
    }
    let diagnostics = rows
        .iter()
        .filter(|r| r.status != ScanStatus::Ok)
        .map(|r| format!("lambda={}: {}", r.lambda.text, r.status.as_str()))
        .collect();
    CommandOutput {
        text: text_table(&lines),
        records,
        complete,
        diagnostics,
    }
}

/// Convergence table 1 (`λ = 0.5, 2`, `D = 10..20`, with exact rows) or
/// table 2 (`λ = 100`, `D = 5..17` and `λ = 4489`, `D = 5..16`).
///
/// `context` maps a block's `D_max` to its working precision.
pub fn cmd_table<F>(which: u8, context: F) -> Result<CommandOutput>
where
    F: Fn(usize) -> Result<PrecisionCtx>,
{
    let (blocks, with_exact): (&[(&str, usize, usize)], bool) = match which {
        1 => (&[("0.5", 10, 20), ("2", 10, 20)], true),
        2 => (&[("100", 5, 17), ("4489", 5, 16)], false),
        _ => return crate::error::param(format!("no table {which}; choose 1 or 2")),
    };
    let mut out = CommandOutput {
        complete: true,
        ..Default::default()
    };
    let mut texts = Vec::new();
    for &(text, d_min, d_max) in blocks {
        let ctx = context(d_max)?;
        let lambda = Lambda {
            text: text.into(),
            value: ctx.parse_real(text)?,
        };
        let block = run_block(&lambda, 0, d_min, d_max, None, &ctx)?;
        out.complete &= block.complete();
        out.diagnostics.extend(block.diagnostics());
        out.records.extend(block.records(with_exact, &ctx));
        texts.push(block.text(with_exact, &ctx));
    }
    out.text = texts.join("\n");
    Ok(out)
}
