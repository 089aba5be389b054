use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One CSV row: the error estimate of one classifier at one feature length.
/// Bound columns are filled for `ned` rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub family: String,
    pub n: usize,
    pub t: usize,
    pub r: f64,
    pub classifier: String,
    pub error_estimate: f64,
    pub stderr: f64,
    pub bound_thm1_mean: Option<f64>,
    pub bound_thm1_min: Option<f64>,
    pub bound_thm1_max: Option<f64>,
    pub bound_cor1: Option<f64>,
    pub bound_appendix: Option<f64>,
    pub reps: usize,
    pub tests_per_label: usize,
    pub seed: u64,
    /// `min(bound_thm1_mean, 1)`, for plotting.
    pub bound_thm1_clamped: Option<f64>,
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` to `path` (header plus one line per row), replacing any
/// existing file.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no result rows to write".into()));
    }
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?)
}
