//! Osborne and Parlett-Reinsch style balancing.
//!
//! All algorithms sweep `i = 0..n` cyclically and rescale row `i` by `1/f`
//! and column `i` by `f`. They differ in how `f` is chosen and when a step
//! is accepted:
//!
//! * Osborne: `f = sqrt(r/c)` with off-diagonal 2-norms, always applied.
//! * radix restricted: `f` is the power of the radix closest to
//!   `sqrt(r/c)`, applied only when `c^p + r^p` drops below
//!   `decrease_factor * s`. With `p = 1` and the diagonal excluded this is the
//!   LAPACK `GEBAL` rule; including the diagonal makes the decrease test see
//!   the whole row and column, which stops over-balancing of nearly
//!   triangular matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{
    radix_log2, row_col_norms, vec_norm, DenseMatrix, NormIndex, NormSpec, ScalingDiagonal,
};

/// Relative tolerance used by [`balance`] for the Osborne iteration.
pub const OSBORNE_TOL: f64 = 1e-12;

/// Largest `|log2 d_ii|` a radix-restricted run may reach.
pub const MAX_SCALING_LOG2: i32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BalanceMode {
    Osborne,
    RadixRestricted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceOptions {
    pub spec: NormSpec,
    pub radix: u32,
    pub decrease_factor: f64,
    pub max_sweeps: usize,
    pub mode: BalanceMode,
}

impl BalanceOptions {
    /// LAPACK `GEBAL`: 1-norm, diagonal excluded, radix 2, factor 0.95.
    pub const fn lapack() -> Self {
        Self {
            spec: NormSpec::off_diagonal(NormIndex::One),
            radix: 2,
            decrease_factor: 0.95,
            max_sweeps: 100,
            mode: BalanceMode::RadixRestricted,
        }
    }

    /// Radix-restricted balancing with the diagonal included in `c` and `r`.
    pub const fn proposed(p: NormIndex) -> Self {
        Self {
            spec: NormSpec::with_diagonal(p),
            ..Self::lapack()
        }
    }

    pub const fn osborne() -> Self {
        Self {
            spec: NormSpec::off_diagonal(NormIndex::Two),
            mode: BalanceMode::Osborne,
            ..Self::lapack()
        }
    }

    pub fn validate(&self) -> Result<()> {
        radix_log2(self.radix)?;
        if !(self.decrease_factor > 0.0 && self.decrease_factor < 1.0) {
            return Err(Error::InvalidOption("decrease factor must lie in (0, 1)"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidOption("max_sweeps must be at least 1"));
        }
        if self.mode == BalanceMode::Osborne && self.spec != NormSpec::off_diagonal(NormIndex::Two)
        {
            return Err(Error::InvalidOption(
                "Osborne mode uses the off-diagonal 2-norm",
            ));
        }
        Ok(())
    }
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self::lapack()
    }
}

/// The four balancing variants compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Osborne,
    Lapack,
    OneNormProposed,
    TwoNormProposed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Osborne,
        Algorithm::Lapack,
        Algorithm::OneNormProposed,
        Algorithm::TwoNormProposed,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Osborne => "osborne",
            Self::Lapack => "lapack",
            Self::OneNormProposed => "proposed-1",
            Self::TwoNormProposed => "proposed-2",
        }
    }

    pub fn options(self) -> BalanceOptions {
        match self {
            Self::Osborne => BalanceOptions::osborne(),
            Self::Lapack => BalanceOptions::lapack(),
            Self::OneNormProposed => BalanceOptions::proposed(NormIndex::One),
            Self::TwoNormProposed => BalanceOptions::proposed(NormIndex::Two),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or(Error::InvalidParameter("unknown algorithm"))
    }
}

/// One visit of row/column `row_col_index`.
///
/// `c` and `r` are the norms measured before the step, `f` the candidate
/// factor (applied only if `applied`). `vec_norm_ratio` is the 1-norm of the
/// whole matrix, diagonal included, relative to the input; `frobenius_norm`
/// is taken after the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub update_index: usize,
    pub row_col_index: usize,
    pub c: f64,
    pub r: f64,
    pub f: f64,
    pub applied: bool,
    pub vec_norm_ratio: f64,
    pub frobenius_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BalanceTrace {
    pub records: Vec<TraceRecord>,
}

impl BalanceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn applied_count(&self) -> usize {
        self.records.iter().filter(|r| r.applied).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResult {
    pub balanced: DenseMatrix,
    pub scaling: ScalingDiagonal,
    pub trace: BalanceTrace,
    pub converged: bool,
    pub sweeps_used: usize,
}

/// Keeps the trace columns up to date; norms are only recomputed after an
/// applied step.
struct TraceBuilder {
    baseline: f64,
    ratio: f64,
    frobenius: f64,
    records: Vec<TraceRecord>,
}

impl TraceBuilder {
    fn new(a: &DenseMatrix) -> Self {
        Self {
            baseline: vec_norm(a, NormSpec::with_diagonal(NormIndex::One)),
            ratio: 1.0,
            frobenius: a.frobenius_norm(),
            records: Vec::new(),
        }
    }

    fn push(&mut self, m: &DenseMatrix, i: usize, c: f64, r: f64, f: f64, applied: bool) {
        if applied {
            let now = vec_norm(m, NormSpec::with_diagonal(NormIndex::One));
            self.ratio = if self.baseline > 0.0 {
                now / self.baseline
            } else {
                1.0
            };
            self.frobenius = m.frobenius_norm();
        }
        self.records.push(TraceRecord {
            update_index: self.records.len() + 1,
            row_col_index: i,
            c,
            r,
            f,
            applied,
            vec_norm_ratio: self.ratio,
            frobenius_norm: self.frobenius,
        });
    }

    fn finish(self) -> BalanceTrace {
        BalanceTrace {
            records: self.records,
        }
    }
}

/// Osborne's iteration in the off-diagonal 2-norm.
///
/// Stops after the first sweep in which every visited pair satisfies
/// `|c - r| <= tol * max(c, r, 1)`. Each step lowers `c^2 + r^2` to `2rc`, so
/// the Frobenius norm never increases.
pub fn osborne_balance(a: &DenseMatrix, tol: f64, opts: &BalanceOptions) -> Result<BalanceResult> {
    opts.validate()?;
    if opts.mode != BalanceMode::Osborne {
        return Err(Error::InvalidOption("osborne_balance needs Osborne mode"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let n = a.n();
    let mut m = a.clone();
    let mut d = vec![1.0; n];
    let mut trace = TraceBuilder::new(a);
    let mut converged = false;
    let mut sweeps_used = opts.max_sweeps;

    for sweep in 1..=opts.max_sweeps {
        let mut within = true;
        for i in 0..n {
            let (c, r) = row_col_norms(&m, i, opts.spec);
            if c == 0.0 || r == 0.0 {
                return Err(Error::ZeroRowOrColumn { index: i });
            }
            if libm::fabs(c - r) > tol * c.max(r).max(1.0) {
                within = false;
            }
            let f = libm::sqrt(r) / libm::sqrt(c);
            let applied = f != 1.0;
            if applied {
                d[i] *= f;
                m.scale_col(i, f);
                m.scale_row_inv(i, f);
            }
            trace.push(&m, i, c, r, f, applied);
        }
        if within {
            converged = true;
            sweeps_used = sweep;
            break;
        }
    }

    Ok(BalanceResult {
        balanced: m,
        scaling: ScalingDiagonal::from_positive(d)?,
        trace: trace.finish(),
        converged,
        sweeps_used,
    })
}

/// Result of rounding the ideal factor `sqrt(r/c)` to a power of the radix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorStep {
    /// `factor = radix^exponent`.
    pub exponent: i32,
    pub factor: f64,
    /// `c * factor`
    pub c: f64,
    /// `r / factor`
    pub r: f64,
}

/// Runs the two radix loops: grow `c` while `c < r/radix`, then shrink while
/// `c >= r*radix`. On exit `radix^-1 (r/c) <= f^2 < (r/c) radix`.
pub fn restrict_factor(c: f64, r: f64, radix: u32) -> Result<FactorStep> {
    if radix < 2 {
        return Err(Error::InvalidRadix(radix));
    }
    if !(c > 0.0 && r > 0.0 && c.is_finite() && r.is_finite()) {
        return Err(Error::NonPositiveNorm);
    }
    let beta = f64::from(radix);
    let (mut c, mut r, mut f, mut exponent) = (c, r, 1.0, 0);
    while c < r / beta {
        c *= beta;
        r /= beta;
        f *= beta;
        exponent += 1;
    }
    while c >= r * beta {
        c /= beta;
        r *= beta;
        f /= beta;
        exponent -= 1;
    }
    Ok(FactorStep {
        exponent,
        factor: f,
        c,
        r,
    })
}

/// `c'^p + r'^p < gamma * s`: the step is worth taking.
pub fn significant_decrease(c: f64, r: f64, s: f64, gamma: f64, p: NormIndex) -> bool {
    p.pow(c) + p.pow(r) < gamma * s
}

/// Whether moving row/column `i` by `2^shift` keeps every entry normal and
/// the accumulated scaling within [`MAX_SCALING_LOG2`].
fn shift_is_safe(m: &DenseMatrix, i: usize, total_log2: i64, shift: i32) -> bool {
    if total_log2.unsigned_abs() > MAX_SCALING_LOG2 as u64 {
        return false;
    }
    let ok = |x: f64, s: i32| {
        if x == 0.0 {
            return true;
        }
        let y = libm::scalbn(x, s);
        y.is_finite() && libm::fabs(y) >= f64::MIN_POSITIVE
    };
    (0..m.n())
        .filter(|&j| j != i)
        .all(|j| ok(m.get(j, i), shift) && ok(m.get(i, j), -shift))
}

/// Radix-restricted balancing (Parlett-Reinsch / `GEBAL`), parameterised by
/// the norm and whether the diagonal enters `c` and `r`.
///
/// A zero `c` or `r` skips the visit. Sweeps repeat until one applies no
/// update or `max_sweeps` is exhausted.
pub fn gebal_balance(a: &DenseMatrix, opts: &BalanceOptions) -> Result<BalanceResult> {
    opts.validate()?;
    if opts.mode != BalanceMode::RadixRestricted {
        return Err(Error::InvalidOption("gebal_balance needs radix-restricted mode"));
    }
    let bits = radix_log2(opts.radix)?;
    let p = opts.spec.p;
    let n = a.n();
    let mut m = a.clone();
    let mut exponents = vec![0i32; n];
    let mut trace = TraceBuilder::new(a);
    let mut converged = false;
    let mut sweeps_used = opts.max_sweeps;

    for sweep in 1..=opts.max_sweeps {
        let mut changed = false;
        for i in 0..n {
            let (c, r) = row_col_norms(&m, i, opts.spec);
            let mut f = 1.0;
            let mut applied = false;
            if c > 0.0 && r > 0.0 {
                let s = p.pow(c) + p.pow(r);
                let step = restrict_factor(c, r, opts.radix)?;
                f = step.factor;
                if significant_decrease(step.c, step.r, s, opts.decrease_factor, p) {
                    let shift = bits * step.exponent;
                    let total = i64::from(bits) * (i64::from(exponents[i]) + i64::from(step.exponent));
                    if shift_is_safe(&m, i, total, shift) {
                        m.shift_row_col(i, shift);
                        exponents[i] += step.exponent;
                        applied = true;
                        changed = true;
                    }
                }
            }
            trace.push(&m, i, c, r, f, applied);
        }
        if !changed {
            converged = true;
            sweeps_used = sweep;
            break;
        }
    }

    Ok(BalanceResult {
        balanced: m,
        scaling: ScalingDiagonal::from_exponents(opts.radix, exponents)?,
        trace: trace.finish(),
        converged,
        sweeps_used,
    })
}

/// Runs the algorithm selected by `opts.mode` on the whole matrix.
pub fn balance(a: &DenseMatrix, opts: &BalanceOptions) -> Result<BalanceResult> {
    match opts.mode {
        BalanceMode::Osborne => osborne_balance(a, OSBORNE_TOL, opts),
        BalanceMode::RadixRestricted => gebal_balance(a, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::apply_similarity;

    fn case_study(eps: f64) -> DenseMatrix {
        DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 2.0, 1.0, 0.0],
            [0.0, 0.0, 3.0, 1.0],
            [eps, 0.0, 0.0, 4.0],
        ])
        .unwrap()
    }

    #[test]
    fn restrict_factor_examples() {
        let eq = restrict_factor(3.0, 3.0, 2).unwrap();
        assert_eq!((eq.exponent, eq.factor, eq.c, eq.r), (0, 1.0, 3.0, 3.0));
        let up = restrict_factor(1.0, 100.0, 2).unwrap();
        assert_eq!((up.exponent, up.factor), (3, 8.0));
        assert_eq!((up.c, up.r), (8.0, 12.5));
        let down = restrict_factor(100.0, 1.0, 2).unwrap();
        assert_eq!((down.exponent, down.factor), (-3, 0.125));
        assert_eq!(restrict_factor(0.0, 1.0, 2), Err(Error::NonPositiveNorm));
        assert_eq!(restrict_factor(1.0, -1.0, 2), Err(Error::NonPositiveNorm));
        assert_eq!(restrict_factor(1.0, 1.0, 1), Err(Error::InvalidRadix(1)));
    }

    #[test]
    fn decrease_test_examples() {
        assert!(!significant_decrease(1.0, 1.0, 2.0, 0.95, NormIndex::One));
        assert!(significant_decrease(1.0, 1.0, 10.0, 0.95, NormIndex::One));
        assert!(significant_decrease(1.0, 1.0, 10.0, 0.95, NormIndex::Two));
    }

    #[test]
    fn option_validation() {
        assert!(BalanceOptions::lapack().validate().is_ok());
        assert!(BalanceOptions::osborne().validate().is_ok());
        let mut o = BalanceOptions::lapack();
        o.decrease_factor = 1.0;
        assert!(o.validate().is_err());
        o = BalanceOptions::lapack();
        o.max_sweeps = 0;
        assert!(o.validate().is_err());
        o = BalanceOptions::lapack();
        o.radix = 10;
        assert_eq!(o.validate(), Err(Error::InvalidRadix(10)));
        o = BalanceOptions::osborne();
        o.spec = NormSpec::with_diagonal(NormIndex::Two);
        assert!(o.validate().is_err());
    }

    #[test]
    fn algorithm_labels_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.label().parse::<Algorithm>().unwrap(), a);
            assert!(a.options().validate().is_ok());
        }
        assert!("gebal".parse::<Algorithm>().is_err());
    }

    #[test]
    fn diagonal_matrix_is_left_alone() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, -5.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        for alg in [Algorithm::Lapack, Algorithm::OneNormProposed, Algorithm::TwoNormProposed] {
            let res = gebal_balance(&a, &alg.options()).unwrap();
            assert!(res.converged);
            assert_eq!(res.sweeps_used, 1);
            assert_eq!(res.trace.applied_count(), 0);
            assert_eq!(res.trace.len(), 3);
            assert_eq!(res.scaling.exponents().unwrap(), &[0, 0, 0]);
            assert_eq!(res.balanced, a);
        }
    }

    #[test]
    fn proposed_two_norm_rejects_every_step_on_case_study() {
        let a = case_study(1e-32);
        let res = gebal_balance(&a, &Algorithm::TwoNormProposed.options()).unwrap();
        assert!(res.converged);
        assert_eq!(res.trace.applied_count(), 0);
        assert_eq!(res.scaling.kappa(), 1.0);
        // first visit: column (1,0,0,eps), row (1,1,0,0)
        let first = res.trace.records[0];
        assert_eq!(first.c, 1.0);
        assert!((first.r - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(first.f, 1.0);
    }

    #[test]
    fn lapack_mode_over_balances_case_study() {
        let a = case_study(1e-32);
        let res = gebal_balance(&a, &BalanceOptions::lapack()).unwrap();
        assert!(res.converged);
        let kappa = res.scaling.kappa();
        assert!(kappa > 1e22 && kappa < 1e26, "kappa {kappa}");
        let off = vec_norm(&res.balanced, NormSpec::off_diagonal(NormIndex::One))
            / vec_norm(&a, NormSpec::off_diagonal(NormIndex::One));
        assert!(off < 1e-6, "off-diagonal ratio {off}");
        assert_eq!(apply_similarity(&a, &res.scaling).unwrap(), res.balanced);
    }

    #[test]
    fn decrease_holds_on_every_applied_step() {
        let a = case_study(1e-12);
        for alg in [Algorithm::Lapack, Algorithm::OneNormProposed, Algorithm::TwoNormProposed] {
            let opts = alg.options();
            let res = gebal_balance(&a, &opts).unwrap();
            for rec in res.trace.records.iter().filter(|r| r.applied) {
                let p = opts.spec.p;
                let s = p.pow(rec.c) + p.pow(rec.r);
                let after = p.pow(rec.c * rec.f) + p.pow(rec.r / rec.f);
                assert!(after < opts.decrease_factor * s);
            }
        }
    }

    #[test]
    fn osborne_on_symmetric_matrix_is_identity() {
        let a = DenseMatrix::from_rows(&[[2.0, -1.0, 0.5], [-1.0, 3.0, 4.0], [0.5, 4.0, 1.0]]).unwrap();
        let res = osborne_balance(&a, OSBORNE_TOL, &BalanceOptions::osborne()).unwrap();
        assert!(res.converged);
        assert_eq!(res.sweeps_used, 1);
        assert_eq!(res.scaling.values(), vec![1.0; 3]);
        assert_eq!(res.balanced, a);
    }

    #[test]
    fn osborne_rejects_reducible_input() {
        let a = case_study(0.0);
        assert_eq!(
            osborne_balance(&a, OSBORNE_TOL, &BalanceOptions::osborne()),
            Err(Error::ZeroRowOrColumn { index: 0 })
        );
        assert!(osborne_balance(&a, 0.0, &BalanceOptions::osborne()).is_err());
        assert!(osborne_balance(&a, 1e-12, &BalanceOptions::lapack()).is_err());
        assert!(gebal_balance(&a, &BalanceOptions::osborne()).is_err());
    }

    #[test]
    fn osborne_matches_case_study_closed_form() {
        let eps = libm::scalbn(1.0, -64);
        let a = case_study(eps);
        let mut opts = BalanceOptions::osborne();
        opts.max_sweeps = 5000;
        let res = osborne_balance(&a, 1e-13, &opts).unwrap();
        assert!(res.converged);
        let d = res.scaling.values();
        let expected = [1.0, 2f64.powi(-16), 2f64.powi(-32), 2f64.powi(-48)];
        for i in 0..4 {
            let ratio = (d[i] / d[0]) / expected[i];
            assert!((ratio - 1.0).abs() < 1e-6, "d[{i}] ratio {ratio}");
        }
    }
}
