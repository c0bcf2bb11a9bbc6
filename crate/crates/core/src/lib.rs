//! Matrix balancing laboratory.
//!
//! Diagonal similarity balancing (`D^{-1} A D`) in three flavours: Osborne's
//! exact 2-norm iteration, the radix-restricted Parlett-Reinsch iteration used
//! by LAPACK's `GEBAL`, and a diagonal-inclusive variant whose stopping test
//! accounts for `|a_ii|`. Around them sit the tools needed to judge a balancing:
//! a dense nonsymmetric eigensolver, eigenvalue condition numbers, relative
//! backward error of recovered eigenvectors, and deterministic generators for
//! the test families.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and experiment tables live in the companion `mbal` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod balancing;
pub mod diagnostics;
mod error;
pub mod generators;
pub mod matrix;
pub mod reducibility;

pub use balancing::{
    balance, gebal_balance, osborne_balance, restrict_factor, significant_decrease, Algorithm,
    BalanceMode, BalanceOptions, BalanceResult, BalanceTrace, FactorStep, TraceRecord,
};
pub use diagnostics::{
    backward_error_bound, diagnose, eig_condition, eigen_decompose, max_eig_condition_scaled,
    recover_eigenvectors, relative_backward_error, spectral_norm, CMatrix, DiagnosticsReport,
    EigenDecomposition,
};
pub use error::{Error, Result};
pub use generators::{
    badly_scaled, case_study_balancing, case_study_exact_eigensystem, case_study_matrix,
    hessenberg_of_random, near_triangular, Seed,
};
pub use matrix::{
    apply_similarity, row_col_norms, vec_norm, DenseMatrix, NormIndex, NormSpec, ScalingDiagonal,
};
pub use reducibility::{
    balance_with_permutation, is_irreducible, permute_to_block_triangular, BlockStructure,
};

/// Unit roundoff of IEEE double precision, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
