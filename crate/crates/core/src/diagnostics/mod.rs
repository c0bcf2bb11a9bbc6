//! Eigendecomposition and the quantities used to judge a balancing:
//! relative backward error of recovered eigenvectors, eigenvalue condition
//! numbers and the `u kappa(D) |Ã|_F / |A|_F` backward error bound.

mod eigen;
mod spectral;

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, DenseMatrix, NormIndex, NormSpec, ScalingDiagonal};
use crate::UNIT_ROUNDOFF;

pub(crate) use eigen::hessenberg_reduce;
pub use spectral::{spectral_norm, spectral_norm_complex};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_real(a: &DenseMatrix) -> Self {
        Self {
            n: a.n(),
            data: a.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let n = columns.len();
        let mut m = Self::zeros(n);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "column length mismatch");
            m.set_column(j, col);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.data[i * self.n + j]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &z) in col.iter().enumerate() {
            self.data[i * self.n + j] = z;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Unit 2-norm columns, largest component real and positive.
    pub right_vectors: CMatrix,
    /// Left eigenvectors `y` with `y^H A = lambda y^H`, paired with
    /// `eigenvalues` by index.
    pub left_vectors: Option<CMatrix>,
}

fn vector_norm(v: &[Complex64]) -> f64 {
    let scale = v
        .iter()
        .fold(0.0_f64, |m, z| m.max(libm::fabs(z.re)).max(libm::fabs(z.im)));
    if scale == 0.0 {
        return 0.0;
    }
    let ssq: f64 = v.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * libm::sqrt(ssq)
}

/// Unit 2-norm with the largest-magnitude component rotated to the positive
/// real axis. `None` for a zero vector.
fn normalize_with_phase(v: &mut [Complex64]) -> Option<()> {
    let norm = vector_norm(v);
    if norm == 0.0 {
        return None;
    }
    let mut k = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            k = i;
        }
    }
    let phase = v[k].conj() / v[k].norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
    v[k].im = 0.0;
    Some(())
}

fn decompose_right(a: &DenseMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.n();
    let eig = eigen::real_eigen(a.as_slice(), n)?;
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n);
    let mut j = 0;
    while j < n {
        let ev = &eig.vectors;
        let vcol = |k: usize| (0..n).map(move |i| ev[i * n + k]);
        if eig.im[j] == 0.0 {
            let mut col: Vec<Complex64> = vcol(j).map(|x| Complex64::new(x, 0.0)).collect();
            normalize_with_phase(&mut col).ok_or(Error::ZeroColumn { index: j })?;
            values.push(Complex64::new(eig.re[j], 0.0));
            vectors.set_column(j, &col);
            j += 1;
        } else {
            let mut col: Vec<Complex64> = vcol(j)
                .zip(vcol(j + 1))
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            normalize_with_phase(&mut col).ok_or(Error::ZeroColumn { index: j })?;
            let conj: Vec<Complex64> = col.iter().map(|z| z.conj()).collect();
            values.push(Complex64::new(eig.re[j], eig.im[j]));
            values.push(Complex64::new(eig.re[j + 1], eig.im[j + 1]));
            vectors.set_column(j, &col);
            vectors.set_column(j + 1, &conj);
            j += 2;
        }
    }
    Ok((values, vectors))
}

/// Right eigenpairs of a real square matrix (Hessenberg reduction plus
/// shifted QR).
pub fn eigen_decompose(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let (eigenvalues, right_vectors) = decompose_right(a)?;
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors,
        left_vectors: None,
    })
}

/// Right and left eigenpairs. Left vectors come from a separate
/// decomposition of `A^T`, paired by nearest eigenvalue (lowest index wins a
/// tie).
pub fn eigen_decompose_with_left(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let (eigenvalues, right_vectors) = decompose_right(a)?;
    let (t_values, t_vectors) = decompose_right(&a.transpose())?;
    let n = a.n();
    let mut used = vec![false; n];
    let mut left = CMatrix::zeros(n);
    for (i, lambda) in eigenvalues.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for (j, mu) in t_values.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = (mu - lambda).norm();
            if best == usize::MAX || dist < best_dist {
                best = j;
                best_dist = dist;
            }
        }
        used[best] = true;
        // A^T w = mu w with mu ~ lambda  =>  y = conj(w) satisfies y^H A = lambda y^H
        let y: Vec<Complex64> = t_vectors.column(best).iter().map(|z| z.conj()).collect();
        left.set_column(i, &y);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors,
        left_vectors: Some(left),
    })
}

/// Sorts eigenvalues by real part, then imaginary part.
pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvectors of `A = D Ã D^{-1}` from those of `Ã`: `D ṽ / |D ṽ|_2`.
pub fn recover_eigenvectors(d: &ScalingDiagonal, v_tilde: &CMatrix) -> Result<CMatrix> {
    let n = v_tilde.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    let shifts: Option<Vec<i32>> = d.exponents().map(|e| {
        let bits = d.radix().unwrap_or(2).trailing_zeros() as i32;
        e.iter().map(|x| x * bits).collect()
    });
    let values = d.values();
    let mut out = CMatrix::zeros(n);
    for j in 0..n {
        let mut col = v_tilde.column(j);
        for (i, z) in col.iter_mut().enumerate() {
            *z = match &shifts {
                Some(s) => Complex64::new(libm::scalbn(z.re, s[i]), libm::scalbn(z.im, s[i])),
                None => *z * values[i],
            };
        }
        let norm = vector_norm(&col);
        if norm == 0.0 {
            return Err(Error::ZeroColumn { index: j });
        }
        col.iter_mut().for_each(|z| *z /= norm);
        out.set_column(j, &col);
    }
    Ok(out)
}

/// `A V - V diag(lambda)`.
pub fn eigen_residual(a: &DenseMatrix, v: &CMatrix, eigenvalues: &[Complex64]) -> CMatrix {
    let n = a.n();
    let mut r = CMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                r[(i, j)] += v[(k, j)] * aik;
            }
        }
        for j in 0..n {
            r[(i, j)] -= v[(i, j)] * eigenvalues[j];
        }
    }
    r
}

/// `|A V - V Λ|_2 / |A|_2` with spectral norms.
pub fn relative_backward_error(a: &DenseMatrix, v: &CMatrix, eigenvalues: &[Complex64]) -> f64 {
    let res = spectral_norm_complex(&eigen_residual(a, v, eigenvalues));
    let norm_a = spectral_norm(a);
    if norm_a == 0.0 {
        return if res == 0.0 { 0.0 } else { f64::INFINITY };
    }
    res / norm_a
}

/// Absolute eigenvalue condition number `|x| |y| / |y^H x|`.
pub fn eig_condition(x: &[Complex64], y: &[Complex64]) -> Result<f64> {
    let dot: Complex64 = y.iter().zip(x).map(|(yi, xi)| yi.conj() * xi).sum();
    let denom = dot.norm();
    if denom == 0.0 {
        return Err(Error::InfiniteCondition);
    }
    Ok(vector_norm(x) * vector_norm(y) / denom)
}

fn max_condition(eig: &EigenDecomposition) -> Result<f64> {
    let left = eig
        .left_vectors
        .as_ref()
        .ok_or(Error::InvalidParameter("left eigenvectors required"))?;
    let mut worst = 0.0_f64;
    for i in 0..eig.eigenvalues.len() {
        let k = eig_condition(&eig.right_vectors.column(i), &left.column(i))?;
        worst = worst.max(k);
    }
    Ok(worst)
}

/// `u * max_i kappa(lambda_i, A)`.
pub fn max_eig_condition_scaled(a: &DenseMatrix) -> Result<f64> {
    Ok(UNIT_ROUNDOFF * max_condition(&eigen_decompose_with_left(a)?)?)
}

/// `u kappa(D) |Ã|_F / |A|_F`.
pub fn backward_error_bound(a: &DenseMatrix, a_tilde: &DenseMatrix, d: &ScalingDiagonal) -> f64 {
    let fa = a.frobenius_norm();
    let ratio = if fa > 0.0 {
        a_tilde.frobenius_norm() / fa
    } else {
        1.0
    };
    UNIT_ROUNDOFF * d.kappa() * ratio
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsReport {
    /// `|A V - V Λ|_2 / |A|_2` for eigenvectors computed on `Ã` and mapped
    /// back through `D`.
    pub relative_backward_error: f64,
    /// `u * max kappa(lambda, Ã)`.
    pub max_eig_condition: f64,
    pub bound_value: f64,
    /// 1-norm of `vec(Ã)` over that of `vec(A)`.
    pub vec_norm_ratio_with_diag: f64,
    /// Same, off-diagonal entries only.
    pub vec_norm_ratio_without_diag: f64,
    pub kappa_d: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

/// Eigensolve `Ã`, recover eigenvectors of `A` through `D` and measure.
pub fn diagnose(
    a: &DenseMatrix,
    a_tilde: &DenseMatrix,
    d: &ScalingDiagonal,
) -> Result<DiagnosticsReport> {
    let eig = eigen_decompose_with_left(a_tilde)?;
    let v = recover_eigenvectors(d, &eig.right_vectors)?;
    let with = NormSpec::with_diagonal(NormIndex::One);
    let without = NormSpec::off_diagonal(NormIndex::One);
    Ok(DiagnosticsReport {
        relative_backward_error: relative_backward_error(a, &v, &eig.eigenvalues),
        max_eig_condition: UNIT_ROUNDOFF * max_condition(&eig)?,
        bound_value: backward_error_bound(a, a_tilde, d),
        vec_norm_ratio_with_diag: ratio(vec_norm(a_tilde, with), vec_norm(a, with)),
        vec_norm_ratio_without_diag: ratio(vec_norm(a_tilde, without), vec_norm(a, without)),
        kappa_d: d.kappa(),
    })
}
