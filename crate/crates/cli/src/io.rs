//! Series files, CSV tables and JSON summaries.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Reads a series file: one real per line, blank lines and lines starting
/// with `#` ignored.
pub fn read_series(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_series(&text, path)
}

pub fn parse_series(text: &str, path: &Path) -> CliResult<Vec<f64>> {
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| CliError::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            msg: format!("expected one number, found '{line}'"),
        })?;
        if !v.is_finite() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                msg: format!("non-finite value '{line}'"),
            });
        }
        values.push(v);
    }
    Ok(values)
}

pub fn write_series(path: &Path, values: &[f64]) -> CliResult<()> {
    let mut out = create(path)?;
    for v in values {
        writeln!(out, "{v}").map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

/// Writes all rows (with a header) to `path`.
pub fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One JSON object on one line.
pub fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("summaries serialize to JSON")
}
