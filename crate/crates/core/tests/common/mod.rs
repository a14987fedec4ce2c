#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

use rug::ops::Pow;
use rug::Float;

pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn rpm(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_rpm"))
        .args(args)
        .output()
        .expect("rpm binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
        code: out.status.code().unwrap_or(-1),
    }
}

pub fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name);
    std::fs::read_to_string(path).expect("golden file present")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub lambda: String,
    pub rows: Vec<Row>,
}

impl Block {
    pub fn row(&self, label: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Parses the text layout of `rpm sequence` / `rpm table`.
pub fn parse_blocks(text: &str) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::new();
    for line in text.lines() {
        if let Some(l) = line.strip_prefix("lambda = ") {
            blocks.push(Block {
                lambda: l.trim().to_string(),
                rows: Vec::new(),
            });
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 || fields[0] == "D" {
            continue;
        }
        let block = blocks.last_mut().expect("rows follow a lambda header");
        block.rows.push(Row {
            label: fields[0].to_string(),
            re: fields[1].to_string(),
            im: fields[2].to_string(),
        });
    }
    blocks
}

pub fn big(text: &str) -> Float {
    Float::with_val(512, Float::parse(text).expect("numeric field"))
}

/// `|got − want|` in units of the last printed digit of `want`.
pub fn last_digit_units(got: &str, want: &str) -> f64 {
    let digits: String = want.chars().filter(|c| c.is_ascii_digit()).collect();
    let significant = digits.trim_start_matches('0');
    let n = significant.len().max(1) as i32;
    let lead = {
        let a = big(want).abs();
        if a.is_zero() {
            0
        } else {
            a.log10().floor().to_f64() as i32
        }
    };
    let unit = Float::with_val(512, 10).pow(lead - n + 1);
    let diff = Float::with_val(512, big(got) - big(want)).abs();
    (diff / unit).to_f64()
}

/// Number of leading significant digits shared by `a` and `b`:
/// `−log10(|a − b| / |b|)`.
pub fn agreeing_digits(a: &Float, b: &Float) -> f64 {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    if diff.is_zero() {
        return f64::INFINITY;
    }
    -(diff / Float::with_val(b.prec(), b.abs_ref()))
        .log10()
        .to_f64()
}

/// Parses CSV output into header and rows.
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}
