//! Atomic file emission: artifacts are written to a temp file in the
//! target directory and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("serialize: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// CSV with a header row, comma separators and line-feed terminators.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    write_atomic(path, &bytes)
}

/// Shortest round-trip decimal formatting; deterministic for a given value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
