// Dense nonsymmetric eigensolver: Householder reduction to Hessenberg form,
// Francis double-shift QR to real Schur form, then back substitution for the
// eigenvectors of the quasi-triangular factor. Follows the EISPACK
// orthes/hqr2 pair (Martin, Wilkinson, Peters) in the JAMA arrangement.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Real Schur based decomposition in EISPACK layout: eigenvalue `k` is
/// `re[k] + i im[k]`; for a complex pair with `im[k] > 0` the eigenvector is
/// `v[:, k] + i v[:, k+1]` and its partner is the conjugate.
pub(crate) struct RealEigen {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub vectors: Vec<f64>,
}

/// Householder reduction of the row-major `n x n` matrix `h` to upper
/// Hessenberg form. Returns the accumulated orthogonal factor when
/// `accumulate` is set. Entries below the subdiagonal are left as scratch.
pub(crate) fn hessenberg_reduce(h: &mut [f64], n: usize, accumulate: bool) -> Option<Vec<f64>> {
    let at = |i: usize, j: usize| i * n + j;
    let mut ort = vec![0.0; n];
    let high = n.saturating_sub(1);

    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| libm::fabs(h[at(i, m - 1)])).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[at(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[at(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[at(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[at(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[at(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[at(m, m - 1)] = scale * g;
    }

    if !accumulate {
        return None;
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[at(i, i)] = 1.0;
    }
    for m in (1..high).rev() {
        if h[at(m, m - 1)] == 0.0 {
            continue;
        }
        for i in (m + 1)..=high {
            ort[i] = h[at(i, m - 1)];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[at(i, j)];
            }
            // double division avoids underflow
            g = (g / ort[m]) / h[at(m, m - 1)];
            for i in m..=high {
                v[at(i, j)] += g * ort[i];
            }
        }
    }
    Some(v)
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if libm::fabs(yr) > libm::fabs(yi) {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Eigenvalues and (unnormalised) eigenvectors of a real square matrix.
#[allow(unused_assignments)]
pub(crate) fn real_eigen(a: &[f64], nn: usize) -> Result<RealEigen> {
    let mut h = a.to_vec();
    let mut v = hessenberg_reduce(&mut h, nn, true).expect("accumulated");
    let at = |i: usize, j: usize| i * nn + j;
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];

    let eps = f64::EPSILON;
    let max_iter = 30 * nn.max(1);
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += libm::fabs(h[at(i, j)]);
        }
    }

    // n is the active trailing index; isize so it may drop below zero.
    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= 0 {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = nu;
        while l > 0 {
            s = libm::fabs(h[at(l - 1, l - 1)]) + libm::fabs(h[at(l, l)]);
            if s == 0.0 {
                s = norm;
            }
            if libm::fabs(h[at(l, l - 1)]) < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // one root
            h[at(nu, nu)] += exshift;
            d[nu] = h[at(nu, nu)];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // two roots
            w = h[at(nu, nu - 1)] * h[at(nu - 1, nu)];
            p = (h[at(nu - 1, nu - 1)] - h[at(nu, nu)]) / 2.0;
            q = p * p + w;
            z = libm::sqrt(libm::fabs(q));
            h[at(nu, nu)] += exshift;
            h[at(nu - 1, nu - 1)] += exshift;
            x = h[at(nu, nu)];

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[at(nu, nu - 1)];
                s = libm::fabs(x) + libm::fabs(z);
                p = x / s;
                q = z / s;
                r = libm::sqrt(p * p + q * q);
                p /= r;
                q /= r;

                for j in (nu - 1)..nn {
                    z = h[at(nu - 1, j)];
                    h[at(nu - 1, j)] = q * z + p * h[at(nu, j)];
                    h[at(nu, j)] = q * h[at(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[at(i, nu - 1)];
                    h[at(i, nu - 1)] = q * z + p * h[at(i, nu)];
                    h[at(i, nu)] = q * h[at(i, nu)] - p * z;
                }
                for i in 0..nn {
                    z = v[at(i, nu - 1)];
                    v[at(i, nu - 1)] = q * z + p * v[at(i, nu)];
                    v[at(i, nu)] = q * v[at(i, nu)] - p * z;
                }
            } else {
                // complex pair
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // no convergence yet; form shift
            x = h[at(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[at(nu - 1, nu - 1)];
                w = h[at(nu, nu - 1)] * h[at(nu - 1, nu)];
            }

            // Wilkinson's ad hoc shift
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[at(i, i)] -= x;
                }
                s = libm::fabs(h[at(nu, nu - 1)]) + libm::fabs(h[at(nu - 1, nu - 2)]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // MATLAB's ad hoc shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = libm::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[at(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence {
                    index: nu,
                    iterations: iter - 1,
                });
            }

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[at(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[at(m + 1, m)] + h[at(m, m + 1)];
                q = h[at(m + 1, m + 1)] - z - r - s;
                r = h[at(m + 2, m + 1)];
                s = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if libm::fabs(h[at(m, m - 1)]) * (libm::fabs(q) + libm::fabs(r))
                    < eps
                        * (libm::fabs(p)
                            * (libm::fabs(h[at(m - 1, m - 1)])
                                + libm::fabs(z)
                                + libm::fabs(h[at(m + 1, m + 1)])))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=nu {
                h[at(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[at(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=n, columns m..=n
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[at(k, k - 1)];
                    q = h[at(k + 1, k - 1)];
                    r = if notlast { h[at(k + 2, k - 1)] } else { 0.0 };
                    x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = libm::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[at(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[at(k, k - 1)] = -h[at(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[at(k, j)] + q * h[at(k + 1, j)];
                        if notlast {
                            p += r * h[at(k + 2, j)];
                            h[at(k + 2, j)] -= p * z;
                        }
                        h[at(k, j)] -= p * x;
                        h[at(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[at(i, k)] + y * h[at(i, k + 1)];
                        if notlast {
                            p += z * h[at(i, k + 2)];
                            h[at(i, k + 2)] -= p * r;
                        }
                        h[at(i, k)] -= p;
                        h[at(i, k + 1)] -= p * q;
                    }
                    for i in 0..nn {
                        p = x * v[at(i, k)] + y * v[at(i, k + 1)];
                        if notlast {
                            p += z * v[at(i, k + 2)];
                            v[at(i, k + 2)] -= p * r;
                        }
                        v[at(i, k)] -= p;
                        v[at(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        return Ok(RealEigen {
            re: d,
            im: e,
            vectors: v,
        });
    }

    // back substitution on the quasi-triangular Schur factor
    for nu in (0..nn).rev() {
        p = d[nu];
        q = e[nu];
        if q == 0.0 {
            // real vector
            let mut l = nu;
            h[at(nu, nu)] = 1.0;
            for i in (0..nu).rev() {
                w = h[at(i, i)] - p;
                r = 0.0;
                for j in l..=nu {
                    r += h[at(i, j)] * h[at(j, nu)];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[at(i, nu)] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h[at(i, i + 1)];
                        y = h[at(i + 1, i)];
                        q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        t = (x * s - z * r) / q;
                        h[at(i, nu)] = t;
                        h[at(i + 1, nu)] = if libm::fabs(x) > libm::fabs(z) {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    // overflow control
                    t = libm::fabs(h[at(i, nu)]);
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[at(j, nu)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector, stored in columns nu-1 (real) and nu (imag)
            let mut l = nu - 1;
            if libm::fabs(h[at(nu, nu - 1)]) > libm::fabs(h[at(nu - 1, nu)]) {
                h[at(nu - 1, nu - 1)] = q / h[at(nu, nu - 1)];
                h[at(nu - 1, nu)] = -(h[at(nu, nu)] - p) / h[at(nu, nu - 1)];
            } else {
                let (cr, ci) = cdiv(0.0, -h[at(nu - 1, nu)], h[at(nu - 1, nu - 1)] - p, q);
                h[at(nu - 1, nu - 1)] = cr;
                h[at(nu - 1, nu)] = ci;
            }
            h[at(nu, nu - 1)] = 0.0;
            h[at(nu, nu)] = 1.0;
            for i in (0..nu.saturating_sub(1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=nu {
                    ra += h[at(i, j)] * h[at(j, nu - 1)];
                    sa += h[at(i, j)] * h[at(j, nu)];
                }
                w = h[at(i, i)] - p;

                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[at(i, nu - 1)] = cr;
                        h[at(i, nu)] = ci;
                    } else {
                        x = h[at(i, i + 1)];
                        y = h[at(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps
                                * norm
                                * (libm::fabs(w)
                                    + libm::fabs(q)
                                    + libm::fabs(x)
                                    + libm::fabs(y)
                                    + libm::fabs(z));
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[at(i, nu - 1)] = cr;
                        h[at(i, nu)] = ci;
                        if libm::fabs(x) > libm::fabs(z) + libm::fabs(q) {
                            h[at(i + 1, nu - 1)] =
                                (-ra - w * h[at(i, nu - 1)] + q * h[at(i, nu)]) / x;
                            h[at(i + 1, nu)] = (-sa - w * h[at(i, nu)] - q * h[at(i, nu - 1)]) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * h[at(i, nu - 1)], -s - y * h[at(i, nu)], z, q);
                            h[at(i + 1, nu - 1)] = cr;
                            h[at(i + 1, nu)] = ci;
                        }
                    }
                    // overflow control
                    t = libm::fabs(h[at(i, nu - 1)]).max(libm::fabs(h[at(i, nu)]));
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[at(j, nu - 1)] /= t;
                            h[at(j, nu)] /= t;
                        }
                    }
                }
            }
        }
    }

    // back transformation to eigenvectors of the original matrix
    for j in (0..nn).rev() {
        for i in 0..nn {
            z = 0.0;
            for k in 0..=j {
                z += v[at(i, k)] * h[at(k, j)];
            }
            v[at(i, j)] = z;
        }
    }

    Ok(RealEigen {
        re: d,
        im: e,
        vectors: v,
    })
}
