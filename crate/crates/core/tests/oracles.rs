use mbal_core::diagnostics::{eigen_decompose_with_left, sort_eigenvalues, spectral_norm};
use mbal_core::generators::NormalStream;
use mbal_core::*;

fn normal_matrix(n: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::new(n, NormalStream::new(Seed(seed)).fill(n * n)).unwrap()
}

/// Straight transcription of the radix-restricted 1-norm loop with the
/// diagonal left out, written against plain indexing and multiplications.
fn reference_gebal(a: &DenseMatrix) -> Vec<i32> {
    let n = a.n();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut e = vec![0i32; n];
    loop {
        let mut noconv = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[j][i].abs();
                    r += m[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut k = 0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
                k += 1;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
                k -= 1;
            }
            if c + r < 0.95 * s {
                e[i] += k;
                for row in m.iter_mut() {
                    row[i] *= f;
                }
                for x in m[i].iter_mut() {
                    *x /= f;
                }
                noconv = true;
            }
        }
        if !noconv {
            return e;
        }
    }
}

#[test]
fn lapack_mode_matches_reference_transcription() {
    let mut inputs = vec![
        generators::case_study_matrix(1e-32).unwrap(),
        generators::case_study_matrix(1e-4).unwrap(),
        generators::badly_scaled(30, Seed(4)).unwrap(),
        generators::hessenberg_of_random(25, Seed(5)).unwrap(),
    ];
    for s in 0..12 {
        let mut a = normal_matrix(7, 100 + s);
        let g = ScalingDiagonal::from_exponents(2, (0..7).map(|k| (k as i32 * 7 + s as i32) % 19 - 9).collect()).unwrap();
        a = apply_similarity(&a, &g).unwrap();
        inputs.push(a);
    }
    for a in &inputs {
        let res = gebal_balance(a, &BalanceOptions::lapack()).unwrap();
        assert!(res.converged);
        assert_eq!(res.scaling.exponents().unwrap(), reference_gebal(a).as_slice());
    }
}

#[test]
fn case_study_lapack_mode_over_balances() {
    let a = generators::case_study_matrix(1e-32).unwrap();
    let res = gebal_balance(&a, &BalanceOptions::lapack()).unwrap();
    // exponent spread near log2(1e24)
    let e = res.scaling.exponents().unwrap();
    let spread = e.iter().max().unwrap() - e.iter().min().unwrap();
    assert!((75..=85).contains(&spread), "{e:?}");
    let without = NormSpec::off_diagonal(NormIndex::One);
    assert!(vec_norm(&res.balanced, without) / vec_norm(&a, without) < 1e-6);
}

#[test]
fn osborne_beats_random_diagonals() {
    for seed in 0..5 {
        let a = normal_matrix(6, 10 + seed);
        let res = osborne_balance(&a, 1e-12, &BalanceOptions::osborne()).unwrap();
        assert!(res.converged);
        let best = res.balanced.frobenius_norm();
        for i in 0..6 {
            let (c, r) = row_col_norms(&res.balanced, i, NormSpec::off_diagonal(NormIndex::Two));
            assert!((c - r).abs() <= 1e-12 * c.max(r).max(1.0));
        }
        let mut logs = NormalStream::new(Seed(1000 + seed));
        for _ in 0..1000 {
            let d: Vec<f64> = (0..6).map(|_| libm::exp(2.0 * logs.next_normal())).collect();
            let d = ScalingDiagonal::from_positive(d).unwrap();
            let other = apply_similarity(&a, &d).unwrap().frobenius_norm();
            assert!(best <= other * (1.0 + 1e-12), "{best} > {other}");
        }
    }
}

#[test]
fn closed_form_eigensystem_agrees_with_solver() {
    for eps in [0.0, 1e-8, 1e-4] {
        let a = generators::case_study_matrix(eps).unwrap();
        let (exact, vectors) = generators::case_study_exact_eigensystem(eps).unwrap();
        let mut vals = eigen_decompose(&a).unwrap().eigenvalues;
        sort_eigenvalues(&mut vals);
        for (z, x) in vals.iter().zip(exact) {
            assert!((z.re - x).abs() <= 1e-12 && z.im.abs() <= 1e-12, "eps {eps}: {z} vs {x}");
        }
        let fro = a.frobenius_norm();
        for j in 0..4 {
            let res: f64 = (0..4)
                .map(|i| {
                    let av: f64 = (0..4).map(|k| a.get(i, k) * vectors[k][j]).sum();
                    (av - exact[j] * vectors[i][j]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-13 * fro);
        }
    }
}

#[test]
fn exact_balancing_reaches_the_ten_thirteenths_limit() {
    let eps = 1e-32;
    let a = generators::case_study_matrix(eps).unwrap();
    let d = generators::case_study_balancing(eps).unwrap();
    let b = apply_similarity(&a, &d).unwrap();
    let with = NormSpec::with_diagonal(NormIndex::One);
    let without = NormSpec::off_diagonal(NormIndex::One);
    assert!((vec_norm(&b, with) / vec_norm(&a, with) - 10.0 / 13.0).abs() < 1e-6);
    assert!(vec_norm(&b, without) / vec_norm(&a, without) < 1e-6);
}

#[test]
fn recovery_through_exact_scaling_needs_the_small_components() {
    let eps = libm::scalbn(1.0, -64);
    let a = generators::case_study_matrix(eps).unwrap();
    let d = generators::case_study_balancing(eps).unwrap();
    let b = apply_similarity(&a, &d).unwrap();
    let eig = eigen_decompose(&b).unwrap();
    let j = (0..4)
        .max_by(|&x, &y| eig.eigenvalues[x].re.total_cmp(&eig.eigenvalues[y].re))
        .unwrap();
    let target = [1.0, 3.0, 6.0, 6.0].map(|x| x / 82f64.sqrt());
    let distance = |v: &CMatrix| -> f64 {
        v.column(j).iter().zip(target).map(|(z, t)| (z.norm() - t).powi(2)).sum::<f64>().sqrt()
    };

    // accurate small components: the direction of A's eigenvector comes back
    let v = recover_eigenvectors(&d, &eig.right_vectors).unwrap();
    assert!(distance(&v) < 1e-6, "{}", distance(&v));
    assert!(relative_backward_error(&a, &v, &eig.eigenvalues) < 1e-6);

    // first component (about 2^-48 of the vector) flushed to zero
    let mut flushed = eig.right_vectors.clone();
    flushed[(0, j)] = num_complex::Complex64::new(0.0, 0.0);
    let w = recover_eigenvectors(&d, &flushed).unwrap();
    assert_eq!(w[(0, j)].norm(), 0.0);
    assert!(distance(&w) > 0.1);
    assert!(relative_backward_error(&a, &w, &eig.eigenvalues) > 1e-2);

    let direct = eigen_decompose(&a).unwrap();
    assert!(relative_backward_error(&a, &direct.right_vectors, &direct.eigenvalues) <= 1e-13);
}

#[test]
fn recovery_round_trip() {
    let n = 6;
    let mut z = NormalStream::new(Seed(77));
    let cols: Vec<Vec<num_complex::Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| num_complex::Complex64::new(z.next_normal(), z.next_normal())).collect())
        .collect();
    let v = CMatrix::from_columns(&cols);
    let d = ScalingDiagonal::from_positive((0..n).map(|_| libm::exp(3.0 * z.next_normal())).collect()).unwrap();
    let scaled = recover_eigenvectors(&d.inverse(), &v).unwrap();
    let back = recover_eigenvectors(&d, &scaled).unwrap();
    for j in 0..n {
        let orig = v.column(j);
        let norm = orig.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for (x, y) in orig.iter().zip(back.column(j)) {
            assert!((x / norm - y).norm() < 1e-14);
        }
    }
}

#[test]
fn jordan_like_condition_matches_closed_form() {
    let delta = 1e-8;
    let a = DenseMatrix::from_rows(&[[1.0, 1.0], [delta, 1.0]]).unwrap();
    let eig = eigen_decompose_with_left(&a).unwrap();
    let left = eig.left_vectors.unwrap();
    // x = (1, ±sqrt δ), y = (±sqrt δ, 1): κ = (1 + δ) / (2 sqrt δ)
    let expected = (1.0 + delta) / (2.0 * delta.sqrt());
    for j in 0..2 {
        let k = eig_condition(&eig.right_vectors.column(j), &left.column(j)).unwrap();
        assert!((k / expected - 1.0).abs() < 1e-6, "{k} vs {expected}");
    }
}

#[test]
fn hessenberg_generator_preserves_spectrum() {
    let n = 20;
    let g = normal_matrix(n, 31);
    let h = generators::hessenberg_of_random(n, Seed(31)).unwrap();
    let mut x = eigen_decompose(&g).unwrap().eigenvalues;
    let mut y = eigen_decompose(&h).unwrap().eigenvalues;
    sort_eigenvalues(&mut x);
    sort_eigenvalues(&mut y);
    for (p, q) in x.iter().zip(&y) {
        assert!((p - q).norm() <= 1e-10 * p.norm().max(1.0), "{p} vs {q}");
    }
}

#[test]
fn generators_are_deterministic() {
    for s in [0, 1, u64::MAX] {
        assert_eq!(
            generators::near_triangular(10, 1e-30, Seed(s)).unwrap(),
            generators::near_triangular(10, 1e-30, Seed(s)).unwrap()
        );
        assert_eq!(
            generators::hessenberg_of_random(10, Seed(s)).unwrap(),
            generators::hessenberg_of_random(10, Seed(s)).unwrap()
        );
        assert_eq!(
            generators::badly_scaled(10, Seed(s)).unwrap(),
            generators::badly_scaled(10, Seed(s)).unwrap()
        );
    }
}

#[test]
fn identity_diagnostics() {
    let a = DenseMatrix::identity(5);
    assert_eq!(max_eig_condition_scaled(&a).unwrap(), UNIT_ROUNDOFF);
    let d = ScalingDiagonal::identity_radix(5, 2).unwrap();
    assert_eq!(backward_error_bound(&a, &a, &d), UNIT_ROUNDOFF);
    assert_eq!(spectral_norm(&a), 1.0);
}

#[test]
fn symmetric_matrix_conditions_are_one() {
    let g = normal_matrix(12, 8);
    let s = DenseMatrix::new(12, (0..144).map(|k| g.get(k / 12, k % 12) + g.get(k % 12, k / 12)).collect()).unwrap();
    let m = max_eig_condition_scaled(&s).unwrap();
    assert!(m >= UNIT_ROUNDOFF * (1.0 - 1e-12) && m <= 2.0 * UNIT_ROUNDOFF, "{m}");
}

#[test]
fn lapack_balancing_raises_hessenberg_conditioning() {
    let h = generators::hessenberg_of_random(40, Seed(2)).unwrap();
    let before = max_eig_condition_scaled(&h).unwrap();
    let res = balance_with_permutation(&h, &BalanceOptions::lapack()).unwrap();
    let after = max_eig_condition_scaled(&res.balanced).unwrap();
    assert!(after > before, "{after} <= {before}");
}
