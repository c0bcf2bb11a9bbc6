//! Dense square matrices, diagonal scalings and the p-norm primitives used by
//! every balancing algorithm.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// Square real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds an `n x n` matrix from row-major entries. Every entry must be finite.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.data[i * self.n + j])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    /// Multiplies column `j` by `factor` in place.
    pub fn scale_col(&mut self, j: usize, factor: f64) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + j] *= factor;
        }
    }

    /// Divides row `i` by `divisor` in place.
    pub fn scale_row_inv(&mut self, i: usize, divisor: f64) {
        let n = self.n;
        for x in &mut self.data[i * n..(i + 1) * n] {
            *x /= divisor;
        }
    }

    /// Exact power-of-two scaling: column `j` by `2^shift`, row `j` by `2^-shift`.
    pub(crate) fn shift_row_col(&mut self, j: usize, shift: i32) {
        let n = self.n;
        for i in 0..n {
            let x = &mut self.data[i * n + j];
            *x = libm::scalbn(*x, shift);
        }
        for x in &mut self.data[j * n..(j + 1) * n] {
            *x = libm::scalbn(*x, -shift);
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = NormAccumulator::new(NormIndex::Two);
        self.data.iter().for_each(|&x| acc.push(x));
        acc.finish()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, libm::fabs(*x)))
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        Self { n: k, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Self { n, data }
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Which p-norm to use. Only 1 and 2 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormIndex {
    One,
    Two,
}

impl NormIndex {
    pub fn new(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            other => Err(Error::InvalidNorm(other)),
        }
    }

    pub fn value(self) -> u32 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }

    /// `x^p` for the norm index.
    #[inline]
    pub fn pow(self, x: f64) -> f64 {
        match self {
            Self::One => x,
            Self::Two => x * x,
        }
    }
}

/// Norm used for row/column measurements and whether `a_ii` takes part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormSpec {
    pub p: NormIndex,
    pub include_diagonal: bool,
}

impl NormSpec {
    pub fn new(p: u32, include_diagonal: bool) -> Result<Self> {
        Ok(Self {
            p: NormIndex::new(p)?,
            include_diagonal,
        })
    }

    pub const fn off_diagonal(p: NormIndex) -> Self {
        Self {
            p,
            include_diagonal: false,
        }
    }

    pub const fn with_diagonal(p: NormIndex) -> Self {
        Self {
            p,
            include_diagonal: true,
        }
    }
}

/// Streaming p-norm. The 2-norm keeps a running scale so that sums of
/// squares neither overflow nor underflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NormAccumulator {
    p: NormIndex,
    scale: f64,
    ssq: f64,
}

impl NormAccumulator {
    pub(crate) fn new(p: NormIndex) -> Self {
        Self {
            p,
            scale: 0.0,
            ssq: match p {
                NormIndex::One => 0.0,
                NormIndex::Two => 1.0,
            },
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, x: f64) {
        let a = libm::fabs(x);
        match self.p {
            NormIndex::One => self.ssq += a,
            NormIndex::Two => {
                if a == 0.0 {
                    return;
                }
                if self.scale < a {
                    let r = self.scale / a;
                    self.ssq = 1.0 + self.ssq * r * r;
                    self.scale = a;
                } else {
                    let r = a / self.scale;
                    self.ssq += r * r;
                }
            }
        }
    }

    pub(crate) fn finish(self) -> f64 {
        match self.p {
            NormIndex::One => self.ssq,
            NormIndex::Two => self.scale * libm::sqrt(self.ssq),
        }
    }
}

/// Column norm `c` and row norm `r` of index `i`, with or without `a_ii`.
pub fn row_col_norms(a: &DenseMatrix, i: usize, spec: NormSpec) -> (f64, f64) {
    assert!(i < a.n, "index {i} out of range for dimension {}", a.n);
    let mut c = NormAccumulator::new(spec.p);
    let mut r = NormAccumulator::new(spec.p);
    for j in 0..a.n {
        if j == i && !spec.include_diagonal {
            continue;
        }
        c.push(a.get(j, i));
        r.push(a.get(i, j));
    }
    (c.finish(), r.finish())
}

/// p-norm of all entries stacked into one vector.
pub fn vec_norm(a: &DenseMatrix, spec: NormSpec) -> f64 {
    let n = a.n;
    let mut acc = NormAccumulator::new(spec.p);
    for (k, &x) in a.data.iter().enumerate() {
        if spec.include_diagonal || k / n != k % n {
            acc.push(x);
        }
    }
    acc.finish()
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    ExactRadix { radix: u32, exponents: Vec<i32> },
    Positive { values: Vec<f64> },
}

/// Nonsingular diagonal `D` of a similarity `D^{-1} A D`.
///
/// `ExactRadix` stores `d_ii = radix^e_i` with a power-of-two radix so that
/// applying the scaling only moves binary exponents. `Positive` stores
/// arbitrary positive reals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingDiagonal(Repr);

/// Binary exponent range of normal doubles.
const MIN_NORMAL_EXP: i64 = -1022;
const MAX_NORMAL_EXP: i64 = 1023;

pub(crate) fn radix_log2(radix: u32) -> Result<i32> {
    if radix >= 2 && radix.is_power_of_two() {
        Ok(radix.trailing_zeros() as i32)
    } else {
        Err(Error::InvalidRadix(radix))
    }
}

impl ScalingDiagonal {
    pub fn identity_radix(n: usize, radix: u32) -> Result<Self> {
        radix_log2(radix)?;
        Ok(Self(Repr::ExactRadix {
            radix,
            exponents: vec![0; n],
        }))
    }

    pub fn from_exponents(radix: u32, exponents: Vec<i32>) -> Result<Self> {
        let bits = i64::from(radix_log2(radix)?);
        for (index, &e) in exponents.iter().enumerate() {
            let log2 = bits * i64::from(e);
            if !(MIN_NORMAL_EXP..=MAX_NORMAL_EXP).contains(&log2) {
                return Err(Error::ExponentOutOfRange { index, exponent: e });
            }
        }
        Ok(Self(Repr::ExactRadix { radix, exponents }))
    }

    pub fn from_positive(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveScaling { index });
        }
        Ok(Self(Repr::Positive { values }))
    }

    pub fn n(&self) -> usize {
        match &self.0 {
            Repr::ExactRadix { exponents, .. } => exponents.len(),
            Repr::Positive { values } => values.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.0, Repr::ExactRadix { .. })
    }

    pub fn radix(&self) -> Option<u32> {
        match &self.0 {
            Repr::ExactRadix { radix, .. } => Some(*radix),
            Repr::Positive { .. } => None,
        }
    }

    pub fn exponents(&self) -> Option<&[i32]> {
        match &self.0 {
            Repr::ExactRadix { exponents, .. } => Some(exponents),
            Repr::Positive { .. } => None,
        }
    }

    /// `d_ii` as a double.
    pub fn value(&self, i: usize) -> f64 {
        match &self.0 {
            Repr::ExactRadix { radix, exponents } => {
                libm::scalbn(1.0, radix.trailing_zeros() as i32 * exponents[i])
            }
            Repr::Positive { values } => values[i],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.value(i)).collect()
    }

    /// `D^{-1}`.
    pub fn inverse(&self) -> Self {
        match &self.0 {
            Repr::ExactRadix { radix, exponents } => Self(Repr::ExactRadix {
                radix: *radix,
                exponents: exponents.iter().map(|e| -e).collect(),
            }),
            Repr::Positive { values } => Self(Repr::Positive {
                values: values.iter().map(|v| 1.0 / v).collect(),
            }),
        }
    }

    /// `max d_ii / min d_ii`, the 2-norm condition number of `D`.
    pub fn kappa(&self) -> f64 {
        match &self.0 {
            Repr::ExactRadix { radix, exponents } => {
                let (lo, hi) = exponents
                    .iter()
                    .fold((i32::MAX, i32::MIN), |(lo, hi), &e| (lo.min(e), hi.max(e)));
                if exponents.is_empty() {
                    return 1.0;
                }
                let bits = radix.trailing_zeros() as i32;
                libm::scalbn(1.0, bits * (hi - lo))
            }
            Repr::Positive { values } => {
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                if values.is_empty() {
                    1.0
                } else {
                    hi / lo
                }
            }
        }
    }
}

/// `D^{-1} A D`, i.e. `a_ij * d_jj / d_ii`.
///
/// With an `ExactRadix` scaling every entry is moved by an exact power of
/// two; a result that would overflow or drop below the normal range is
/// reported as [`Error::Range`] because it could not be undone exactly.
pub fn apply_similarity(a: &DenseMatrix, d: &ScalingDiagonal) -> Result<DenseMatrix> {
    let n = a.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    let mut out = Vec::with_capacity(n * n);
    match &d.0 {
        Repr::ExactRadix { radix, exponents } => {
            let bits = i64::from(radix.trailing_zeros());
            for i in 0..n {
                for j in 0..n {
                    let x = a.get(i, j);
                    if x == 0.0 {
                        out.push(x);
                        continue;
                    }
                    let shift = bits * (i64::from(exponents[j]) - i64::from(exponents[i]));
                    let shift = shift.clamp(-4096, 4096) as i32;
                    let y = libm::scalbn(x, shift);
                    if !y.is_finite() || libm::fabs(y) < f64::MIN_POSITIVE {
                        return Err(Error::Range { row: i, col: j });
                    }
                    out.push(y);
                }
            }
        }
        Repr::Positive { values } => {
            for i in 0..n {
                for j in 0..n {
                    let y = a.get(i, j) * values[j] / values[i];
                    if !y.is_finite() {
                        return Err(Error::Range { row: i, col: j });
                    }
                    out.push(y);
                }
            }
        }
    }
    Ok(DenseMatrix::from_raw(n, out))
}
