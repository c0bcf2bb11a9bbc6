use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::experiment::TraceRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn render_rows(rows: &[TraceRow], format: TableFormat) -> Result<Vec<u8>> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Serialize(e.to_string()))?;
            }
            // header even for an empty table
            if rows.is_empty() {
                w.write_record(HEADER).map_err(|e| CliError::Serialize(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))
        }
        TableFormat::Json => {
            let mut buf = serde_json::to_vec_pretty(rows).map_err(|e| CliError::Serialize(e.to_string()))?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

const HEADER: [&str; 11] = [
    "iteration",
    "algorithm",
    "row_col_index",
    "applied",
    "relative_backward_error",
    "u_max_condition",
    "backward_error_bound",
    "vec_norm_ratio",
    "vec_norm_ratio_without_diag",
    "kappa_d",
    "converged",
];

pub fn parse_rows(bytes: &[u8], format: TableFormat) -> Result<Vec<TraceRow>> {
    match format {
        TableFormat::Csv => csv::Reader::from_reader(bytes)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CliError::Serialize(e.to_string())),
        TableFormat::Json => serde_json::from_slice(bytes).map_err(|e| CliError::Serialize(e.to_string())),
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!(".{}.partial", std::process::id()));
    path.with_file_name(name)
}

/// Writes to `path` through a sibling temporary file and a rename, so a
/// failed run never leaves a truncated file behind. `None` means stdout.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io("<stdout>", e));
    };
    let tmp = temp_path(path);
    let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// Runs `produce` and writes its bytes; on any failure an existing partial
/// file at `path` is removed.
pub fn produce_output(path: Option<&Path>, produce: impl FnOnce() -> Result<Vec<u8>>) -> Result<()> {
    let outcome = produce().and_then(|bytes| write_output(path, &bytes));
    if outcome.is_err() {
        if let Some(p) = path {
            let _ = fs::remove_file(temp_path(p));
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, x: f64) -> TraceRow {
        TraceRow {
            iteration: k,
            algorithm: "lapack".into(),
            row_col_index: k % 3,
            applied: k % 2 == 0,
            relative_backward_error: x,
            u_max_condition: x / 3.0,
            backward_error_bound: 1e-300 * x,
            vec_norm_ratio: 0.1 + x,
            vec_norm_ratio_without_diag: 0.05 + x,
            kappa_d: 2f64.powi(k as i32),
            converged: false,
        }
    }

    #[test]
    fn csv_and_json_carry_identical_values() {
        let rows: Vec<TraceRow> = (1..20).map(|k| row(k, 1.0 / k as f64)).collect();
        for fmt in [TableFormat::Csv, TableFormat::Json] {
            let bytes = render_rows(&rows, fmt).unwrap();
            assert_eq!(parse_rows(&bytes, fmt).unwrap(), rows);
        }
        let csv = String::from_utf8(render_rows(&rows, TableFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv.lines().next().unwrap(), HEADER.join(","));
        let empty = String::from_utf8(render_rows(&[], TableFormat::Csv).unwrap()).unwrap();
        assert_eq!(empty.trim(), HEADER.join(","));
    }

    #[test]
    fn failed_production_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let err = produce_output(Some(&path), || Err(CliError::InvalidArgument("boom".into())));
        assert!(err.is_err());
        assert!(!path.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        produce_output(Some(&path), || Ok(b"ok".to_vec())).unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"ok");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
