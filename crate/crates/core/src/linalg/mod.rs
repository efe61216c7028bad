//! Dense complex linear algebra used by the decomposition pipeline.
//!
//! Matrices are row-major. Composite qubit indices are big-endian: site 1 is
//! the most significant bit.

mod completion;
mod matrix;
mod regroup;
mod svd;

pub use completion::{complete_to_unitary, nearest_orthonormal, ORTHONORMAL_TOL};
pub use matrix::{inner, vec_dist, vec_norm, ComplexMatrix, C64, ONE, ZERO};
pub use regroup::{inverse_permutation, permute_legs, regroup};
pub use svd::{numerical_rank, spectral_norm, svd, SvdResult, DEFAULT_RANK_TOL};
