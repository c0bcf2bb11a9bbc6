//! Reducibility detection and block upper triangular permutations.
//!
//! The sparsity digraph has an edge `i -> j` whenever `a_ij != 0` (`i != j`).
//! Its strongly connected components, listed in topological order, give a
//! permutation `P` with `P A P^T` block upper triangular and irreducible
//! diagonal blocks. Exact zeros are the only missing edges.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::balancing::{balance, BalanceMode, BalanceResult, BalanceTrace, TraceRecord};
use crate::balancing::BalanceOptions;
use crate::error::Result;
use crate::matrix::{
    apply_similarity, row_col_norms, vec_norm, DenseMatrix, NormIndex, NormSpec, ScalingDiagonal,
};

/// `permutation[k]` is the original index placed at position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub permutation: Vec<usize>,
    pub block_ranges: Vec<Range<usize>>,
}

impl BlockStructure {
    /// `P A P^T`.
    pub fn permute(&self, a: &DenseMatrix) -> DenseMatrix {
        a.principal_submatrix(&self.permutation)
    }

    pub fn block_count(&self) -> usize {
        self.block_ranges.len()
    }

    /// Original indices of block `b`.
    pub fn block_indices(&self, b: usize) -> &[usize] {
        &self.permutation[self.block_ranges[b].clone()]
    }
}

fn reachable_all(n: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if !seen[w] && w != v && edge(v, w) {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// True iff the sparsity digraph is strongly connected.
pub fn is_irreducible(a: &DenseMatrix) -> bool {
    let n = a.n();
    reachable_all(n, |i, j| a.get(i, j) != 0.0) && reachable_all(n, |i, j| a.get(j, i) != 0.0)
}

/// Iterative Tarjan. Components come out sinks first.
fn tarjan_components(a: &DenseMatrix) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = a.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, next neighbour to examine)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            let mut descended = false;
            while *next < n {
                let w = *next;
                *next += 1;
                if w == v || a.get(v, w) == 0.0 {
                    continue;
                }
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                    descended = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if descended {
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// Strongly connected components in topological order, so that every
/// nonzero `a_ij` with `i`, `j` in different blocks has `block(i) < block(j)`.
pub fn permute_to_block_triangular(a: &DenseMatrix) -> BlockStructure {
    let mut components = tarjan_components(a);
    components.reverse();
    let mut permutation = Vec::with_capacity(a.n());
    let mut block_ranges = Vec::with_capacity(components.len());
    for comp in components {
        let start = permutation.len();
        permutation.extend(comp);
        block_ranges.push(start..permutation.len());
    }
    BlockStructure {
        permutation,
        block_ranges,
    }
}

/// Balances each irreducible diagonal block on its own and assembles the
/// full scaling in the original index order.
///
/// Off-diagonal blocks are carried along by the similarity but never enter a
/// stopping test. A 1x1 block admits no scaling and contributes a single
/// skipped trace record. An irreducible input is handed to the balancer
/// unchanged.
pub fn balance_with_permutation(a: &DenseMatrix, opts: &BalanceOptions) -> Result<BalanceResult> {
    opts.validate()?;
    let blocks = permute_to_block_triangular(a);
    if blocks.block_count() == 1 {
        return balance(a, opts);
    }

    let n = a.n();
    let exact = opts.mode == BalanceMode::RadixRestricted;
    let mut exponents = vec![0i32; n];
    let mut values = vec![1.0f64; n];
    let mut converged = true;
    let mut sweeps_used = 1;
    // (original index, c, r, f, applied) in visit order
    let mut visits: Vec<(usize, f64, f64, f64, bool)> = Vec::new();

    for b in 0..blocks.block_count() {
        let idx = blocks.block_indices(b);
        if idx.len() == 1 {
            let single = a.principal_submatrix(idx);
            let (c, r) = row_col_norms(&single, 0, opts.spec);
            visits.push((idx[0], c, r, 1.0, false));
            continue;
        }
        let sub = a.principal_submatrix(idx);
        let res = balance(&sub, opts)?;
        converged &= res.converged;
        sweeps_used = sweeps_used.max(res.sweeps_used);
        match res.scaling.exponents() {
            Some(e) => idx.iter().zip(e).for_each(|(&k, &e)| exponents[k] = e),
            None => idx
                .iter()
                .zip(res.scaling.values())
                .for_each(|(&k, v)| values[k] = v),
        }
        visits.extend(
            res.trace
                .records
                .iter()
                .map(|t| (idx[t.row_col_index], t.c, t.r, t.f, t.applied)),
        );
    }

    let scaling = if exact {
        ScalingDiagonal::from_exponents(opts.radix, exponents)?
    } else {
        ScalingDiagonal::from_positive(values)?
    };
    let balanced = apply_similarity(a, &scaling)?;
    let trace = replay_trace(a, &visits, opts)?;
    Ok(BalanceResult {
        balanced,
        scaling,
        trace,
        converged,
        sweeps_used,
    })
}

/// Recomputes the whole-matrix trace columns for the concatenated block visits.
fn replay_trace(
    a: &DenseMatrix,
    visits: &[(usize, f64, f64, f64, bool)],
    opts: &BalanceOptions,
) -> Result<BalanceTrace> {
    let baseline = vec_norm(a, NormSpec::with_diagonal(NormIndex::One));
    let mut m = a.clone();
    let mut ratio = 1.0;
    let mut frobenius = a.frobenius_norm();
    let bits = opts.radix.trailing_zeros() as i32;
    let mut records = Vec::with_capacity(visits.len());
    for (k, &(i, c, r, f, applied)) in visits.iter().enumerate() {
        if applied {
            if opts.mode == BalanceMode::RadixRestricted {
                let e = libm::ilogb(f) / bits;
                m.shift_row_col(i, bits * e);
            } else {
                m.scale_col(i, f);
                m.scale_row_inv(i, f);
            }
            ratio = if baseline > 0.0 {
                vec_norm(&m, NormSpec::with_diagonal(NormIndex::One)) / baseline
            } else {
                1.0
            };
            frobenius = m.frobenius_norm();
        }
        records.push(TraceRecord {
            update_index: k + 1,
            row_col_index: i,
            c,
            r,
            f,
            applied,
            vec_norm_ratio: ratio,
            frobenius_norm: frobenius,
        });
    }
    Ok(BalanceTrace { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balancing::{gebal_balance, Algorithm};

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
    fn irreducibility_of_case_study() {
        assert!(is_irreducible(&case_study(1e-32)));
        assert!(!is_irreducible(&case_study(0.0)));
        let dense = DenseMatrix::new(3, (1..=9).map(f64::from).collect()).unwrap();
        assert!(is_irreducible(&dense));
        assert!(is_irreducible(&DenseMatrix::zeros(1)));
    }

    #[test]
    fn single_block_for_irreducible() {
        let s = permute_to_block_triangular(&case_study(1e-3));
        assert_eq!(s.block_ranges, vec![0..4]);
    }

    #[test]
    fn block_diagonal_splits_in_two() {
        let a = DenseMatrix::from_rows(&[
            [1.0, 2.0, 0.0, 0.0],
            [3.0, 4.0, 0.0, 0.0],
            [0.0, 0.0, 5.0, 6.0],
            [0.0, 0.0, 7.0, 8.0],
        ])
        .unwrap();
        let s = permute_to_block_triangular(&a);
        assert_eq!(s.block_count(), 2);
        assert!(s.block_ranges.iter().all(|r| r.len() == 2));
    }

    #[test]
    fn upper_triangular_gives_singletons_in_order() {
        let s = permute_to_block_triangular(&case_study(0.0));
        assert_eq!(s.permutation, vec![0, 1, 2, 3]);
        assert_eq!(s.block_ranges, vec![0..1, 1..2, 2..3, 3..4]);
    }

    #[test]
    fn lower_triangular_is_reversed() {
        let a = case_study(0.0).transpose();
        let s = permute_to_block_triangular(&a);
        assert_eq!(s.permutation, vec![3, 2, 1, 0]);
        let p = s.permute(&a);
        for i in 0..4 {
            for j in 0..i {
                assert_eq!(p.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn irreducible_balancing_is_delegated() {
        let a = case_study(1e-20);
        let opts = Algorithm::Lapack.options();
        assert_eq!(
            balance_with_permutation(&a, &opts).unwrap(),
            gebal_balance(&a, &opts).unwrap()
        );
    }

    #[test]
    fn singleton_blocks_admit_no_scaling() {
        let a = case_study(0.0);
        for alg in Algorithm::ALL {
            let res = balance_with_permutation(&a, &alg.options()).unwrap();
            assert!(res.converged, "{alg}");
            assert_eq!(res.trace.len(), 4);
            assert_eq!(res.trace.applied_count(), 0);
            assert_eq!(res.scaling.kappa(), 1.0);
            assert_eq!(res.balanced, a);
        }
    }

    #[test]
    fn block_diagonal_results_concatenate() {
        let b1 = [[1.0, 1e4], [1e-4, 2.0]];
        let b2 = [[3.0, 1e-6], [1e6, 4.0]];
        let mut rows = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                rows[i][j] = b1[i][j];
                rows[i + 2][j + 2] = b2[i][j];
            }
        }
        let a = DenseMatrix::from_rows(&rows).unwrap();
        let opts = Algorithm::Lapack.options();
        let whole = balance_with_permutation(&a, &opts).unwrap();
        let r1 = gebal_balance(&DenseMatrix::from_rows(&b1).unwrap(), &opts).unwrap();
        let r2 = gebal_balance(&DenseMatrix::from_rows(&b2).unwrap(), &opts).unwrap();
        let mut expected: Vec<i32> = r1.scaling.exponents().unwrap().to_vec();
        expected.extend_from_slice(r2.scaling.exponents().unwrap());
        assert_eq!(whole.scaling.exponents().unwrap(), expected.as_slice());
        assert_eq!(whole.trace.len(), r1.trace.len() + r2.trace.len());
    }
}
