//! Matrix-free tensor-product finite element kernels.
//!
//! The crate bundles the pieces needed to study sum-factorized operator
//! evaluation on CPU:
//!
//! - [`tensor`]: Kronecker-product operators applied by directional contractions,
//!   a dense oracle and flop accounting.
//! - [`precision`]: bit-exact binary16 emulation, the fp16 error-correction split
//!   and precision-parameterized contraction kernels.
//! - [`fe`]: SIPG discretization of the Poisson problem on Cartesian meshes with
//!   vertex-patch operator evaluation.
//! - [`multigrid`]: geometric V-cycle with multiplicative vertex-patch Schwarz smoothing.
//! - [`krylov`]: flexible and standard right-preconditioned GMRES.
//! - [`gpu`]: shared-memory bank-conflict simulation, swizzled layouts, roofline and
//!   padding models.

pub mod error;
pub mod fe;
pub mod gpu;
pub mod krylov;
pub mod multigrid;
pub mod precision;
pub mod tensor;

pub use error::{Error, Result};
