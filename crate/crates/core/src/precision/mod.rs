//! Software binary16 arithmetic, fp16 error correction and precision-parameterized kernels.
//!
//! Low-precision pipelines store vectors in fp32. Only contraction operands are
//! demoted to binary16; products of two halves are exact in fp32, so rounding
//! happens at fp32 accumulation only.

mod binary16;
mod ec;
mod kernel;
mod metrics;
mod mode;

pub use binary16::{from_half, to_half, Binary16};
pub use ec::{ec_matmul, ec_matmul_with, ec_split, EcMatrix, EcPair, EcSides, MatrixF32, EC_SCALE};
pub use kernel::{contract_dir_prec, KernelScratch, PreparedMatrix, Scalar};
pub use metrics::relative_error;
pub use mode::{Accumulator, PrecisionMode};
