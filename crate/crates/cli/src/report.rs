//! JSON and CSV output helpers.

use crate::CliError;
use mzm_cnot::matrix::{ComplexMatrix, C64};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Row-major `{re, im}` entries.
pub fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<ComplexEntry>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

/// One named check with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance, pass: residual <= tolerance }
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Run(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Run(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Run(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Run(e.to_string()))
}
