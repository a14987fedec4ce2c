//! The `rpm` command-line front end.
//!
//! ```text
//! rpm sequence --lambda 0.5 --d 0 --dmin 10 --dmax 20
//! rpm exact --lambda 2
//! rpm scan --grid 0.5,2,100 --format csv
//! rpm table 1
//! ```
//!
//! Exit status is 0 on success, 1 when some rows failed to converge and 2
//! on a usage error.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rug::Float;

pub use commands::{
    cmd_exact, cmd_scan, cmd_sequence, cmd_table, default_scan_grid, scan_rows, CommandOutput,
    ScanRow, ScanStatus,
};
pub use output::{render, Format};

use crate::error::Error;
use crate::mpnum::{CNum, PrecisionCtx};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "rpm",
    version,
    about = "Complex eigenvalues of the exponential potential by Hankel-determinant quantization"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
    /// Significant digits of every printed value.
    #[arg(long, global = true, default_value_t = PrecisionCtx::DEFAULT_DIGITS)]
    digits: usize,
    /// Mantissa bits of the working precision [default: 64 + 32·D_max].
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Roots ε^[D,d] for D = dmin..dmax, followed by the exact eigenvalue.
    Sequence {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        dmin: usize,
        #[arg(long, default_value_t = 20)]
        dmax: usize,
        /// Starting energy `RE,IM` [default: the exact eigenvalue].
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// Exact eigenvalue from the Bessel-order zero.
    Exact {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Starting order `RE,IM` with RE < 0 [default: grid search].
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// RPM limit against the exact eigenvalue over a grid of λ.
    Scan {
        /// Comma-separated λ values [default: 0.1, 0.2, .., 5.0].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        dmax: usize,
    },
    /// Reproduce convergence table 1 (λ = 0.5, 2) or 2 (λ = 100, 4489).
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Working precision; `None` picks `64 + 32·D_max` bits per computation.
    pub precision_bits: Option<u32>,
    pub digits: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// λ as typed on the command line together with its value.
#[derive(Debug, Clone)]
pub struct Lambda {
    pub text: String,
    pub value: Float,
}

#[derive(Debug, Clone)]
pub enum Command {
    Sequence {
        lambda: Lambda,
        d: usize,
        d_min: usize,
        d_max: usize,
        seed: Option<(String, String)>,
    },
    Exact {
        lambda: Lambda,
        seed: Option<(String, String)>,
    },
    Scan {
        grid: Vec<Lambda>,
        d: usize,
        d_max: usize,
    },
    Table(u8),
}

/// Highest precision any λ needs to be parsed at.
const PARSE_BITS: u32 = 4096;

fn parse_lambda(text: &str) -> Result<Lambda, String> {
    let value = Float::parse(text.trim())
        .map(|p| Float::with_val(PARSE_BITS, p))
        .map_err(|_| format!("cannot parse lambda '{text}'"))?;
    if !(value.is_finite() && value > 0) {
        return Err(format!("lambda must be positive, got {text}"));
    }
    Ok(Lambda {
        text: text.trim().to_string(),
        value,
    })
}

fn parse_pair(text: &str) -> Result<(String, String), String> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| format!("seed must be RE,IM, got '{text}'"))?;
    for part in [re, im] {
        if Float::parse(part.trim()).is_err() {
            return Err(format!("cannot parse seed component '{part}'"));
        }
    }
    Ok((re.trim().to_string(), im.trim().to_string()))
}

fn check_range(d_min: usize, d_max: usize) -> Result<(), String> {
    if d_min < 2 {
        return Err(format!("--dmin must be at least 2, got {d_min}"));
    }
    if d_max < d_min {
        return Err(format!("--dmax ({d_max}) is below --dmin ({d_min})"));
    }
    Ok(())
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self, String> {
        let command = match cli.command {
            CommandArgs::Sequence {
                lambda,
                d,
                dmin,
                dmax,
                seed,
            } => {
                check_range(dmin, dmax)?;
                Command::Sequence {
                    lambda: parse_lambda(&lambda)?,
                    d,
                    d_min: dmin,
                    d_max: dmax,
                    seed: seed.as_deref().map(parse_pair).transpose()?,
                }
            }
            CommandArgs::Exact { lambda, seed } => {
                let seed = seed.as_deref().map(parse_pair).transpose()?;
                if let Some((re, _)) = &seed {
                    let re = Float::with_val(64, Float::parse(re).expect("checked"));
                    if re >= 0 || re.is_nan() {
                        return Err("seed order must have a negative real part".into());
                    }
                }
                Command::Exact {
                    lambda: parse_lambda(&lambda)?,
                    seed,
                }
            }
            CommandArgs::Scan { grid, d, dmax } => {
                check_range(2, dmax)?;
                let grid = match grid {
                    Some(texts) => {
                        if texts.iter().all(|t| t.trim().is_empty()) {
                            return Err("lambda grid is empty".into());
                        }
                        let grid = texts
                            .iter()
                            .map(|t| parse_lambda(t))
                            .collect::<Result<Vec<_>, _>>()?;
                        if grid.windows(2).any(|w| w[1].value < w[0].value) {
                            return Err("lambda grid must be ascending".into());
                        }
                        grid
                    }
                    None => default_scan_grid()
                        .iter()
                        .map(|t| parse_lambda(t))
                        .collect::<Result<Vec<_>, _>>()?,
                };
                Command::Scan {
                    grid,
                    d,
                    d_max: dmax,
                }
            }
            CommandArgs::Table { which } => Command::Table(which),
        };
        let cfg = RunConfig {
            command,
            precision_bits: cli.precision_bits,
            digits: cli.digits,
            format: cli.format,
            out: cli.out,
        };
        // validate digits against the precision every computation will use
        for d_max in cfg.dimensions() {
            cfg.context(d_max).map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    fn dimensions(&self) -> Vec<usize> {
        match &self.command {
            Command::Sequence { d_max, .. } | Command::Scan { d_max, .. } => vec![*d_max],
            Command::Exact { .. } => vec![DEFAULT_EXACT_DIM],
            Command::Table(1) => vec![20],
            Command::Table(_) => vec![17, 16],
        }
    }

    /// Precision context for a computation reaching dimension `d_max`.
    pub fn context(&self, d_max: usize) -> crate::Result<PrecisionCtx> {
        let bits = self
            .precision_bits
            .unwrap_or_else(|| PrecisionCtx::for_dimension(d_max).mantissa_bits());
        PrecisionCtx::new(bits, self.digits)
    }
}

/// `exact` runs at the precision of a D = 20 sequence.
const DEFAULT_EXACT_DIM: usize = 20;

fn parse_cnum(ctx: &PrecisionCtx, pair: &(String, String)) -> crate::Result<CNum> {
    CNum::parse(ctx, &pair.0, &pair.1)
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> crate::Result<CommandOutput> {
    match &cfg.command {
        Command::Sequence {
            lambda,
            d,
            d_min,
            d_max,
            seed,
        } => {
            let ctx = cfg.context(*d_max)?;
            let seed = seed.as_ref().map(|s| parse_cnum(&ctx, s)).transpose()?;
            cmd_sequence(lambda, *d, *d_min, *d_max, seed.as_ref(), &ctx)
        }
        Command::Exact { lambda, seed } => {
            let ctx = cfg.context(DEFAULT_EXACT_DIM)?;
            let seed = seed.as_ref().map(|s| parse_cnum(&ctx, s)).transpose()?;
            cmd_exact(lambda, seed.as_ref(), &ctx)
        }
        Command::Scan { grid, d, d_max } => cmd_scan(grid, *d, *d_max, &cfg.context(*d_max)?),
        Command::Table(which) => cmd_table(*which, |d_max| cfg.context(d_max)),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// to the given streams. Returns the process exit status.
pub fn run_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let stream: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = stream.write_all(text.as_bytes());
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e @ Error::Parameter(_)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_PARTIAL;
        }
    };
    for line in &output.diagnostics {
        let _ = writeln!(stderr, "{line}");
    }

    let text = render(&output, cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_PARTIAL;
    }
    if output.complete {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    }
}

/// Entry point used by the `rpm` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_args(args, &mut stdout.lock(), &mut stderr.lock())
}
