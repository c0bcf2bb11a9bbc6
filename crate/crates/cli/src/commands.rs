use std::fmt::Write as _;
use std::path::Path;

use mbal_core::{balance_with_permutation, diagnose, Algorithm, DenseMatrix, DiagnosticsReport, Seed};
use serde::Serialize;

use crate::error::Result;
use crate::experiment::{generate, run_experiment, ExperimentConfig, Family};
use crate::format::{format_f64, format_matrix, read_matrix};
use crate::output::{produce_output, render_rows, TableFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceFormat {
    /// The balanced matrix in the text format, with `D` and the diagnostics
    /// as trailing comment lines.
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportFields {
    pub relative_backward_error: f64,
    pub u_max_condition: f64,
    pub backward_error_bound: f64,
    pub vec_norm_ratio_with_diag: f64,
    pub vec_norm_ratio_without_diag: f64,
    pub kappa_d: f64,
}

impl From<&DiagnosticsReport> for ReportFields {
    fn from(r: &DiagnosticsReport) -> Self {
        Self {
            relative_backward_error: r.relative_backward_error,
            u_max_condition: r.max_eig_condition,
            backward_error_bound: r.bound_value,
            vec_norm_ratio_with_diag: r.vec_norm_ratio_with_diag,
            vec_norm_ratio_without_diag: r.vec_norm_ratio_without_diag,
            kappa_d: r.kappa_d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub algorithm: String,
    pub n: usize,
    pub converged: bool,
    pub sweeps_used: usize,
    pub updates_applied: usize,
    /// Base-2 exponents of `D`; absent for Osborne, whose scaling is not
    /// restricted to powers of two.
    pub exponents: Option<Vec<i32>>,
    pub scaling: Vec<f64>,
    pub balanced: Vec<Vec<f64>>,
    pub diagnostics: ReportFields,
    #[serde(skip)]
    pub balanced_matrix: DenseMatrix,
}

pub fn balance_matrix(a: &DenseMatrix, algorithm: Algorithm) -> Result<BalanceReport> {
    let res = balance_with_permutation(a, &algorithm.options())?;
    let rep = diagnose(a, &res.balanced, &res.scaling)?;
    Ok(BalanceReport {
        algorithm: algorithm.label().to_string(),
        n: a.n(),
        converged: res.converged,
        sweeps_used: res.sweeps_used,
        updates_applied: res.trace.applied_count(),
        exponents: res.scaling.exponents().map(<[i32]>::to_vec),
        scaling: res.scaling.values(),
        balanced: (0..a.n()).map(|i| res.balanced.row(i).to_vec()).collect(),
        diagnostics: ReportFields::from(&rep),
        balanced_matrix: res.balanced,
    })
}

pub fn render_balance(report: &BalanceReport, format: BalanceFormat) -> Result<Vec<u8>> {
    match format {
        BalanceFormat::Json => {
            let mut buf = serde_json::to_vec_pretty(report)
                .map_err(|e| crate::CliError::Serialize(e.to_string()))?;
            buf.push(b'\n');
            Ok(buf)
        }
        BalanceFormat::Text => {
            let mut out = format_matrix(&report.balanced_matrix);
            let join = |xs: &[f64]| xs.iter().map(|&x| format_f64(x)).collect::<Vec<_>>().join(" ");
            let _ = writeln!(
                out,
                "# algorithm {} converged {} sweeps {} applied {}",
                report.algorithm, report.converged, report.sweeps_used, report.updates_applied
            );
            if let Some(e) = &report.exponents {
                let e: Vec<String> = e.iter().map(i32::to_string).collect();
                let _ = writeln!(out, "# exponents {}", e.join(" "));
            }
            let _ = writeln!(out, "# scaling {}", join(&report.scaling));
            let d = &report.diagnostics;
            for (name, v) in [
                ("relative_backward_error", d.relative_backward_error),
                ("u_max_condition", d.u_max_condition),
                ("backward_error_bound", d.backward_error_bound),
                ("vec_norm_ratio_with_diag", d.vec_norm_ratio_with_diag),
                ("vec_norm_ratio_without_diag", d.vec_norm_ratio_without_diag),
                ("kappa_d", d.kappa_d),
            ] {
                let _ = writeln!(out, "# {name} {}", format_f64(v));
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn cmd_balance(input: &Path, algorithm: Algorithm, format: BalanceFormat, out: Option<&Path>) -> Result<()> {
    let a = read_matrix(input)?;
    produce_output(out, || render_balance(&balance_matrix(&a, algorithm)?, format))
}

pub fn cmd_experiment(config: &ExperimentConfig, format: TableFormat, out: Option<&Path>) -> Result<()> {
    produce_output(out, || render_rows(&run_experiment(config)?, format))
}

pub fn cmd_generate(family: Family, n: usize, epsilon: f64, seed: Seed, out: Option<&Path>) -> Result<()> {
    produce_output(out, || {
        let config = ExperimentConfig::new(family, n, epsilon, seed, vec![Algorithm::Lapack])?;
        Ok(format_matrix(&generate(family, config.n, epsilon, seed)?).into_bytes())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_matrix;

    #[test]
    fn identity_stays_identity() {
        let a = DenseMatrix::identity(3);
        for alg in Algorithm::ALL {
            let r = balance_matrix(&a, alg).unwrap();
            assert_eq!(r.balanced_matrix, a);
            assert!(r.scaling.iter().all(|&d| d == 1.0));
            if alg != Algorithm::Osborne {
                assert_eq!(r.exponents.as_deref(), Some(&[0, 0, 0][..]));
            }
        }
    }

    #[test]
    fn text_output_parses_back_as_the_balanced_matrix() {
        let a = mbal_core::case_study_matrix(1e-32).unwrap();
        let r = balance_matrix(&a, Algorithm::Lapack).unwrap();
        let text = String::from_utf8(render_balance(&r, BalanceFormat::Text).unwrap()).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), r.balanced_matrix);
        assert!(text.contains("# exponents "));
        let json: serde_json::Value =
            serde_json::from_slice(&render_balance(&r, BalanceFormat::Json).unwrap()).unwrap();
        assert_eq!(json["algorithm"], "lapack");
        assert_eq!(json["balanced"].as_array().unwrap().len(), 4);
    }
}
