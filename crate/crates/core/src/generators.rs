//! Deterministic test matrices.
//!
//! # Random streams
//!
//! Random families draw standard normals from a SplitMix64 counter stream:
//! the `k`-th 64-bit word (k = 1, 2, ...) is `mix(seed + k * 0x9E3779B97F4A7C15)`
//! with the usual SplitMix64 finaliser. A word `w` becomes a uniform on
//! `(0, 1]` as `((w >> 11) + 1) * 2^-53`. Consecutive uniforms `(u1, u2)` give
//! two normals by Box-Muller, `sqrt(-2 ln u1) cos(2 pi u2)` first and the
//! matching `sin` second. Matrices are filled row-major. All transcendental
//! functions come from `libm`, so streams are identical on every platform.

use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostics::hessenberg_reduce;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, ScalingDiagonal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 as a counter-based generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    seed: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        Self {
            seed: seed.0,
            counter: 0,
        }
    }

    /// Word at an absolute position of the stream, independent of state.
    pub fn word_at(seed: Seed, index: u64) -> u64 {
        let mut z = seed.0.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        Self::word_at(Seed(self.seed), self.counter)
    }

    /// Uniform on `(0, 1]`.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal samples by Box-Muller over [`SplitMix64`].
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: Seed) -> Self {
        Self {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_uniform();
        let u2 = self.rng.next_uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    pub fn fill(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_normal()).collect()
    }
}

fn require_dimension(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidParameter("dimension must be at least 2"))
    } else {
        Ok(())
    }
}

/// The 4x4 nearly reducible matrix: upper bidiagonal with diagonal
/// `1, 2, 3, 4`, ones on the superdiagonal and `eps` in the bottom-left corner.
pub fn case_study_matrix(eps: f64) -> Result<DenseMatrix> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("epsilon must be finite and nonnegative"));
    }
    DenseMatrix::from_rows(&[
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 2.0, 1.0, 0.0],
        [0.0, 0.0, 3.0, 1.0],
        [eps, 0.0, 0.0, 4.0],
    ])
}

/// Closed-form eigenvalues (ascending) and unit eigenvectors (columns) of
/// [`case_study_matrix`].
///
/// With `s = sqrt(1 + eps)` the eigenvalues are `(5 -+ sqrt(5 +- 4 s)) / 2`;
/// they are real only while `5 - 4s >= 0`, i.e. `eps <= 9/16`.
pub fn case_study_exact_eigensystem(eps: f64) -> Result<([f64; 4], [[f64; 4]; 4])> {
    if !(0.0..=0.5625).contains(&eps) {
        return Err(Error::InvalidParameter("epsilon must lie in [0, 9/16]"));
    }
    let s = libm::sqrt(1.0 + eps);
    let big = libm::sqrt(5.0 + 4.0 * s);
    let small = libm::sqrt(5.0 - 4.0 * s);
    let values = [
        0.5 * (5.0 - big),
        0.5 * (5.0 - small),
        0.5 * (5.0 + small),
        0.5 * (5.0 + big),
    ];
    let cols = [
        [
            2.0 / (1.0 + s),
            (3.0 - big) / (1.0 + s),
            (4.0 + 2.0 * s - 2.0 * big) / (1.0 + s),
            3.0 - big,
        ],
        [2.0 / (3.0 - small), 1.0, 0.5 * (1.0 - small), 1.0 - s],
        [2.0 / (3.0 + small), 1.0, 0.5 * (1.0 + small), 1.0 - s],
        [2.0 / (3.0 + big), 1.0, 0.5 * (1.0 + big), 1.0 + s],
    ];
    let mut vectors = [[0.0; 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        let norm = libm::sqrt(col.iter().map(|x| x * x).sum());
        for i in 0..4 {
            vectors[i][j] = col[i] / norm;
        }
    }
    Ok((values, vectors))
}

/// `diag(1, eps^(1/4), eps^(1/2), eps^(3/4))`, which balances the case study
/// exactly in every p-norm.
pub fn case_study_balancing(eps: f64) -> Result<ScalingDiagonal> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("epsilon must be positive"));
    }
    let half = libm::sqrt(eps);
    let quarter = libm::sqrt(half);
    ScalingDiagonal::from_positive(vec![1.0, quarter, half, half * quarter])
}

/// `T + eps N`: `T` upper triangular (diagonal included) and `N` dense, both
/// standard normal. `T` is drawn first, row by row, then `N`.
pub fn near_triangular(n: usize, eps: f64, seed: Seed) -> Result<DenseMatrix> {
    require_dimension(n)?;
    if !eps.is_finite() {
        return Err(Error::InvalidParameter("epsilon must be finite"));
    }
    let mut normals = NormalStream::new(seed);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            data[i * n + j] = normals.next_normal();
        }
    }
    for x in data.iter_mut() {
        *x += eps * normals.next_normal();
    }
    DenseMatrix::new(n, data)
}

/// Upper Hessenberg form of a dense standard normal matrix, by orthogonal
/// (Householder) similarity. Entries below the subdiagonal are exactly zero.
pub fn hessenberg_of_random(n: usize, seed: Seed) -> Result<DenseMatrix> {
    require_dimension(n)?;
    let mut data = NormalStream::new(seed).fill(n * n);
    hessenberg_reduce(&mut data, n, false);
    for i in 2..n {
        for j in 0..i - 1 {
            data[i * n + j] = 0.0;
        }
    }
    DenseMatrix::new(n, data)
}

/// `S^{-1} N S` with `N` standard normal and `S = diag(10^(10 i / (n-1)))`.
pub fn badly_scaled(n: usize, seed: Seed) -> Result<DenseMatrix> {
    require_dimension(n)?;
    let s: Vec<f64> = (0..n)
        .map(|i| libm::pow(10.0, 10.0 * i as f64 / (n - 1) as f64))
        .collect();
    let mut data = NormalStream::new(seed).fill(n * n);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = data[i * n + j] * s[j] / s[i];
        }
    }
    DenseMatrix::new(n, data)
}
