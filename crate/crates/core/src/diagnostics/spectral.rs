// Largest singular value via the Gram matrix: Householder tridiagonalisation
// of a real symmetric matrix followed by Sturm-sequence bisection for its
// top eigenvalue.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::CMatrix;
use crate::matrix::DenseMatrix;

/// Diagonal and subdiagonal of an orthogonally similar tridiagonal matrix.
fn tridiagonalize(mut s: Vec<f64>, m: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |i: usize, j: usize| i * m + j;
    let mut offdiag = vec![0.0; m.saturating_sub(1)];
    let mut v = vec![0.0; m];
    let mut pv = vec![0.0; m];
    for k in 0..m.saturating_sub(1) {
        let len = m - k - 1;
        let x = |i: usize| s[at(k + 1 + i, k)];
        let scale: f64 = (0..len).map(|i| libm::fabs(x(i))).sum();
        if scale == 0.0 || len == 1 {
            offdiag[k] = x(0);
            continue;
        }
        let mut norm2 = 0.0;
        for i in 0..len {
            v[i] = x(i) / scale;
            norm2 += v[i] * v[i];
        }
        let mut alpha = libm::sqrt(norm2);
        if v[0] > 0.0 {
            alpha = -alpha;
        }
        v[0] -= alpha;
        let vtv: f64 = v[..len].iter().map(|a| a * a).sum();
        let beta = 2.0 / vtv;
        offdiag[k] = alpha * scale;
        // p = beta * T v on the trailing block
        for i in 0..len {
            let mut acc = 0.0;
            for j in 0..len {
                acc += s[at(k + 1 + i, k + 1 + j)] * v[j];
            }
            pv[i] = beta * acc;
        }
        let kk = 0.5 * beta * (0..len).map(|i| pv[i] * v[i]).sum::<f64>();
        for i in 0..len {
            pv[i] -= kk * v[i];
        }
        for i in 0..len {
            for j in 0..len {
                s[at(k + 1 + i, k + 1 + j)] -= v[i] * pv[j] + pv[i] * v[j];
            }
        }
    }
    let diag = (0..m).map(|i| s[at(i, i)]).collect();
    (diag, offdiag)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE;
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_eigenvalue_symmetric(s: Vec<f64>, m: usize) -> f64 {
    let (diag, offdiag) = tridiagonalize(s, m);
    let radius = |i: usize| {
        let left = if i > 0 { libm::fabs(offdiag[i - 1]) } else { 0.0 };
        let right = if i + 1 < m { libm::fabs(offdiag[i]) } else { 0.0 };
        left + right
    };
    let mut lo = (0..m).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    lo -= 1e-12 * width.max(libm::fabs(hi));
    hi += 1e-12 * width.max(libm::fabs(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(&diag, &offdiag, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * libm::fabs(hi).max(libm::fabs(lo)) {
            break;
        }
    }
    hi
}

/// Spectral norm of a real square matrix.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    let n = a.n();
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let b: Vec<f64> = a.as_slice().iter().map(|x| x / scale).collect();
    let mut gram = vec![0.0; n * n];
    for k in 0..n {
        let row = &b[k * n..(k + 1) * n];
        for i in 0..n {
            let bi = row[i];
            if bi == 0.0 {
                continue;
            }
            for j in 0..n {
                gram[i * n + j] += bi * row[j];
            }
        }
    }
    scale * libm::sqrt(largest_eigenvalue_symmetric(gram, n).max(0.0))
}

/// Spectral norm of a complex square matrix, through the real symmetric
/// embedding `[[Re G, -Im G], [Im G, Re G]]` of `G = R^H R`.
pub fn spectral_norm_complex(r: &CMatrix) -> f64 {
    let n = r.n();
    let scale = r
        .as_slice()
        .iter()
        .fold(0.0_f64, |m, z| m.max(libm::fabs(z.re)).max(libm::fabs(z.im)));
    if scale == 0.0 {
        return 0.0;
    }
    let b: Vec<Complex64> = r.as_slice().iter().map(|z| z / scale).collect();
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let row = &b[k * n..(k + 1) * n];
        for i in 0..n {
            let bi = row[i].conj();
            for j in 0..n {
                gram[i * n + j] += bi * row[j];
            }
        }
    }
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let g = gram[i * n + j];
            s[i * m + j] = g.re;
            s[(i + n) * m + (j + n)] = g.re;
            s[i * m + (j + n)] = -g.im;
            s[(i + n) * m + j] = g.im;
        }
    }
    scale * libm::sqrt(largest_eigenvalue_symmetric(s, m).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rank_one() {
        let d = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, -7.0]]).unwrap();
        assert!((spectral_norm(&d) - 7.0).abs() < 1e-14);
        // u v^T with |u| = 5, |v| = sqrt(2)
        let r1 = DenseMatrix::from_rows(&[[3.0, 3.0], [4.0, 4.0]]).unwrap();
        assert!((spectral_norm(&r1) - 5.0 * 2f64.sqrt()).abs() < 1e-13);
        assert_eq!(spectral_norm(&DenseMatrix::zeros(3)), 0.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        // singular values of [[1,2],[3,4]]: sqrt((30 + sqrt(884))/2)
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let expected = libm::sqrt((30.0 + libm::sqrt(884.0)) / 2.0);
        let got = spectral_norm(&a);
        assert!((got - expected).abs() < 1e-14 * expected, "{got} vs {expected}");
    }

    #[test]
    fn complex_matches_hand_value() {
        // [[i, 0], [0, 2 + 2i]] has norm 2 sqrt 2
        let mut c = CMatrix::zeros(2);
        c[(0, 0)] = Complex64::new(0.0, 1.0);
        c[(1, 1)] = Complex64::new(2.0, 2.0);
        assert!((spectral_norm_complex(&c) - 8f64.sqrt()).abs() < 1e-14);
        // a real matrix seen as complex
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let ca = CMatrix::from_real(&a);
        assert!((spectral_norm_complex(&ca) - spectral_norm(&a)).abs() < 1e-13);
    }
}
