//! Experiment runs: one trace table row per balancing visit.

use std::fmt;
use std::str::FromStr;

use mbal_core::{
    balance_with_permutation, diagnose, generators, Algorithm, BalanceMode, BalanceResult,
    DenseMatrix, DiagnosticsReport, ScalingDiagonal, Seed,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    CaseStudy,
    NearTriangular,
    Hessenberg,
    BadlyScaled,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::CaseStudy,
        Family::NearTriangular,
        Family::Hessenberg,
        Family::BadlyScaled,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::CaseStudy => "case-study",
            Family::NearTriangular => "near-triangular",
            Family::Hessenberg => "hessenberg",
            Family::BadlyScaled => "badly-scaled",
        }
    }

    /// `epsilon` used when none is given.
    pub fn default_epsilon(self) -> f64 {
        match self {
            Family::CaseStudy => 1e-32,
            Family::NearTriangular => 1e-30,
            Family::Hessenberg | Family::BadlyScaled => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| CliError::InvalidArgument(format!("unknown family {s:?}")))
    }
}

pub const DEFAULT_N: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: usize,
    pub epsilon: f64,
    pub seed: Seed,
    pub algorithms: Vec<Algorithm>,
}

impl ExperimentConfig {
    /// Case-study runs are always 4x4; `epsilon` is ignored by the
    /// Hessenberg and badly-scaled families.
    pub fn new(
        family: Family,
        n: usize,
        epsilon: f64,
        seed: Seed,
        algorithms: Vec<Algorithm>,
    ) -> Result<Self> {
        let n = if family == Family::CaseStudy { 4 } else { n };
        if n < 2 {
            return Err(CliError::InvalidArgument("n must be at least 2".into()));
        }
        if !epsilon.is_finite() {
            return Err(CliError::InvalidArgument("epsilon must be finite".into()));
        }
        if algorithms.is_empty() {
            return Err(CliError::InvalidArgument("no algorithm selected".into()));
        }
        Ok(Self {
            family,
            n,
            epsilon,
            seed,
            algorithms,
        })
    }

    pub fn matrix(&self) -> Result<DenseMatrix> {
        generate(self.family, self.n, self.epsilon, self.seed)
    }
}

pub fn generate(family: Family, n: usize, epsilon: f64, seed: Seed) -> Result<DenseMatrix> {
    let a = match family {
        Family::CaseStudy => generators::case_study_matrix(epsilon),
        Family::NearTriangular => generators::near_triangular(n, epsilon, seed),
        Family::Hessenberg => generators::hessenberg_of_random(n, seed),
        Family::BadlyScaled => generators::badly_scaled(n, seed),
    };
    Ok(a?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub algorithm: String,
    pub row_col_index: usize,
    pub applied: bool,
    pub relative_backward_error: f64,
    pub u_max_condition: f64,
    pub backward_error_bound: f64,
    pub vec_norm_ratio: f64,
    pub vec_norm_ratio_without_diag: f64,
    pub kappa_d: f64,
    pub converged: bool,
}

/// Scalings after each trace record, rebuilt from the recorded factors.
fn scaling_history(result: &BalanceResult, mode: BalanceMode, n: usize) -> Result<Vec<ScalingDiagonal>> {
    let records = &result.trace.records;
    let mut out = Vec::with_capacity(records.len());
    match mode {
        BalanceMode::RadixRestricted => {
            let radix = result.scaling.radix().unwrap_or(2);
            let bits = radix.trailing_zeros() as i32;
            let mut e = vec![0i32; n];
            for rec in records {
                if rec.applied {
                    e[rec.row_col_index] += rec.f.log2().round() as i32 / bits;
                }
                out.push(ScalingDiagonal::from_exponents(radix, e.clone())?);
            }
        }
        BalanceMode::Osborne => {
            let mut d = vec![1.0; n];
            for rec in records {
                if rec.applied {
                    d[rec.row_col_index] *= rec.f;
                }
                out.push(ScalingDiagonal::from_positive(d.clone())?);
            }
        }
    }
    Ok(out)
}

pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub result: BalanceResult,
    pub rows: Vec<TraceRow>,
}

/// Balances `a` and evaluates the diagnostics after every trace record.
/// Diagnostics are computed once per distinct state, in parallel.
pub fn trace_algorithm(a: &DenseMatrix, algorithm: Algorithm) -> Result<AlgorithmRun> {
    let opts = algorithm.options();
    let result = balance_with_permutation(a, &opts)?;
    let history = scaling_history(&result, opts.mode, a.n())?;

    // state k is the scaling after the k-th applied record (0 = input)
    let mut state_of = Vec::with_capacity(history.len());
    let mut states: Vec<&ScalingDiagonal> = Vec::new();
    let identity = ScalingDiagonal::identity_radix(a.n(), 2)?;
    states.push(&identity);
    for (rec, d) in result.trace.records.iter().zip(&history) {
        if rec.applied {
            states.push(d);
        }
        state_of.push(states.len() - 1);
    }
    if let Some(&last) = state_of.last() {
        // the final state must be exactly what was returned
        if last > 0 {
            states[last] = &result.scaling;
        }
    }

    let reports: Vec<DiagnosticsReport> = states
        .par_iter()
        .map(|d| -> Result<DiagnosticsReport> {
            let a_tilde = mbal_core::apply_similarity(a, d)?;
            Ok(diagnose(a, &a_tilde, d)?)
        })
        .collect::<Result<_>>()?;

    let count = result.trace.records.len();
    let rows = result
        .trace
        .records
        .iter()
        .zip(&state_of)
        .enumerate()
        .map(|(k, (rec, &s))| {
            let rep = &reports[s];
            TraceRow {
                iteration: rec.update_index,
                algorithm: algorithm.label().to_string(),
                row_col_index: rec.row_col_index,
                applied: rec.applied,
                relative_backward_error: rep.relative_backward_error,
                u_max_condition: rep.max_eig_condition,
                backward_error_bound: rep.bound_value,
                vec_norm_ratio: rec.vec_norm_ratio,
                vec_norm_ratio_without_diag: rep.vec_norm_ratio_without_diag,
                kappa_d: rep.kappa_d,
                converged: result.converged && k + 1 == count,
            }
        })
        .collect();
    Ok(AlgorithmRun {
        algorithm,
        result,
        rows,
    })
}

/// All rows of an experiment, grouped by algorithm in the configured order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TraceRow>> {
    let a = config.matrix()?;
    let runs: Vec<AlgorithmRun> = config
        .algorithms
        .par_iter()
        .map(|&alg| trace_algorithm(&a, alg))
        .collect::<Result<_>>()?;
    Ok(runs.into_iter().flat_map(|r| r.rows).collect())
}
