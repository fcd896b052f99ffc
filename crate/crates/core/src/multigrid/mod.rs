//! Geometric multigrid on the nested Cartesian hierarchy.
//!
//! The smoother is a multiplicative Schwarz method over vertex patches: the
//! `2^d` colors run one after another, each with a freshly computed residual,
//! and the patch problems are solved exactly by fast diagonalization.

mod patch_solver;
mod transfer;
mod vcycle;

pub use patch_solver::{patch_inverse_apply, FastDiagonalization, PatchSolver};
pub use transfer::embedding_matrices_1d;
pub use vcycle::{Multigrid, SmootherOrdering, VCycleConfig, COARSE_MAX_DOFS};
