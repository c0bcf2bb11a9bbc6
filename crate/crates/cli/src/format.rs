//! Plain-text matrix files.
//!
//! ```text
//! 3
//! 1 2 0
//! 0 1e-30 4
//! -0.5 7 1
//! ```
//!
//! The first non-blank line holds `n`, followed by `n` lines of `n`
//! whitespace-separated decimals. Lines starting with `#` are ignored.
//! Entries are written in the shortest form that parses back to the same
//! double.

use std::fmt::Write as _;
use std::path::Path;

use mbal_core::DenseMatrix;

use crate::error::{CliError, Result};

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(CliError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let n: usize = header.parse().map_err(|_| CliError::Parse {
        line,
        message: format!("expected a dimension, found {header:?}"),
    })?;
    if n == 0 {
        return Err(CliError::Dimension {
            line,
            expected: 1,
            found: 0,
        });
    }

    let mut data = Vec::with_capacity(n * n);
    let mut last = line;
    for _ in 0..n {
        let (line, row) = lines.next().ok_or(CliError::Dimension {
            line: last + 1,
            expected: n,
            found: 0,
        })?;
        last = line;
        let mut count = 0;
        for tok in row.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| CliError::Parse {
                line,
                message: format!("not a number: {tok:?}"),
            })?;
            if !x.is_finite() {
                return Err(CliError::NonFinite {
                    line,
                    text: tok.to_string(),
                });
            }
            data.push(x);
            count += 1;
        }
        if count != n {
            return Err(CliError::Dimension {
                line,
                expected: n,
                found: count,
            });
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(CliError::Dimension {
            line,
            expected: n,
            found: n + 1,
        });
    }
    Ok(DenseMatrix::new(n, data)?)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text)
}

/// Shortest round-trip decimal, plain for moderate magnitudes.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        if x.is_sign_negative() { "-0".into() } else { "0".into() }
    } else if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn format_matrix(a: &DenseMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", a.n());
    for i in 0..a.n() {
        let row: Vec<String> = a.row(i).iter().map(|&x| format_f64(x)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let vals = [
            0.0, -0.0, 1.0, -2.5, 1e-32, 1e-30, 0.1, 1.0 / 3.0, 1e300, -5e-324, 123456789.0, 1e16,
            f64::MAX, 0.000099,
        ];
        for x in vals {
            let s = format_f64(x);
            let y: f64 = s.parse().unwrap();
            assert_eq!(x.to_bits(), y.to_bits(), "{s}");
        }
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(1e-32), "1e-32");
        assert_eq!(format_f64(2.0), "2");
    }

    #[test]
    fn parses_and_formats() {
        let text = "# a comment\n2\n1 2e0\n  -3.5   1E-30 \n\n";
        let a = parse_matrix(text).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 2.0, -3.5, 1e-30]);
        assert_eq!(format_matrix(&a), "2\n1 2\n-3.5 1e-30\n");
        assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn rejects_bad_input() {
        let code = |t: &str| parse_matrix(t).unwrap_err().exit_code();
        assert_eq!(code(""), 2);
        assert_eq!(code("x\n"), 2);
        assert_eq!(code("2\n1 2\n3\n"), 2);
        assert_eq!(code("2\n1 2\n"), 2);
        assert_eq!(code("2\n1 2\n3 4\n5 6\n"), 2);
        assert_eq!(code("2\n1 a\n3 4\n"), 2);
        assert_eq!(code("0\n"), 2);
        assert_eq!(code("2\n1 NaN\n3 4\n"), 1);
        assert_eq!(code("1\ninf\n"), 1);
    }
}
