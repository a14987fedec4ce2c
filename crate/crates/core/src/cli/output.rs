use clap::ValueEnum;
use serde_json::Value;

use super::commands::CommandOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    /// One JSON object per line.
    Json,
}

/// Renders a command's output. CSV columns follow the key order of the first
/// record; `null` becomes an empty field.
pub fn render(output: &CommandOutput, format: Format) -> String {
    match format {
        Format::Text => output.text.clone(),
        Format::Csv => {
            let mut s = String::new();
            if let Some(first) = output.records.first() {
                s.push_str(&first.keys().cloned().collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            for record in &output.records {
                let fields: Vec<String> = record.values().map(csv_field).collect();
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => output
            .records
            .iter()
            .map(|r| format!("{}\n", Value::Object(r.clone())))
            .collect(),
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub(crate) struct Cell {
    text: String,
    right: bool,
}

impl Cell {
    pub(crate) fn left(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            right: false,
        }
    }

    pub(crate) fn right(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            right: true,
        }
    }
}

/// Columns padded to their widest cell and separated by two spaces.
pub(crate) fn text_table(lines: &[Vec<Cell>]) -> String {
    let ncols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| {
            lines
                .iter()
                .filter_map(|l| l.get(c))
                .map(|cell| cell.text.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in lines {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| {
                if cell.right {
                    format!("{:>w$}", cell.text)
                } else {
                    format!("{:<w$}", cell.text)
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
