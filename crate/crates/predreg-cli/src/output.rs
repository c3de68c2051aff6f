//! Fixed-precision table rendering and artifact writing.
//!
//! All numeric output is fixed-point decimal so identical runs produce
//! byte-identical artifacts: statistics and p-values carry six decimals,
//! forecast-grid and series values ten.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use predreg::{Error, Result};

use crate::config::ResolvedConfig;

/// Decimal places for summary statistics, test statistics and p-values.
pub const STAT_DECIMALS: usize = 6;
/// Decimal places for forecast-grid predictions and generated series.
pub const GRID_DECIMALS: usize = 10;

pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    format!("{value:.decimals$}")
}

/// Fixed formatting with `undef` for missing values.
pub fn fmt_opt(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) => fmt_fixed(v, decimals),
        None => "undef".to_string(),
    }
}

/// A header plus rows of equal length, printable aligned and writable as CSV.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, row: Vec<S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Render with columns padded to their widest cell; first column
    /// left-aligned, the rest right-aligned.
    pub fn render(&self) -> String {
        let ncols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let mut out = String::new();
        let write_row = |cells: &[String], out: &mut String| {
            for (i, cell) in cells.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                if i == 0 {
                    let _ = write!(out, "{cell:<width$}", width = widths[i]);
                } else {
                    let _ = write!(out, "{cell:>width$}", width = widths[i]);
                }
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        write_row(&self.headers, &mut out);
        let total: usize = widths.iter().sum::<usize>() + 2 * (ncols - 1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for row in &self.rows {
            write_row(row, &mut out);
        }
        out
    }

    /// Comma-separated form with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Write an artifact under the output directory, creating it if needed.
pub fn write_artifact(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Record the resolved configuration next to the artifacts.
pub fn write_manifest(config: &ResolvedConfig) -> Result<PathBuf> {
    let body = serde_json::to_string_pretty(config)
        .map_err(|e| Error::Config(format!("cannot serialize manifest: {e}")))?;
    write_artifact(&config.out, "run_manifest.json", &format!("{body}\n"))
}
