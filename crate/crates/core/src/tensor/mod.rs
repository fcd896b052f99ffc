//! Sum-factorized application of separable (Kronecker-product) operators.
//!
//! Tensors are stored lexicographically with axis 0 fastest (strides `1, n0, n0*n1`),
//! so viewing a tensor as a matrix along any axis is pure index arithmetic.

mod contract;
mod field;
mod flops;
mod matrix;
mod oracle;
mod separable;

pub use contract::{contract_dir, evaluate_face_trace, evaluate_face_values, evaluate_gradient_at_quadrature};
pub(crate) use contract::contract_slice;
pub use field::TensorField;
pub use flops::{count_flops, Evaluation, FlopBreakdown, FlopReport, FlopVariant};
pub use matrix::Matrix1D;
pub use oracle::{dense_kronecker_oracle, ORACLE_MAX_EXTENT};
pub use separable::{apply_separable, SeparableOperator};

/// Largest tensor rank handled by the kernels.
pub const MAX_DIM: usize = 3;

/// Splits `extents` around `axis` into `(stride, outer)`: the product of the
/// extents before and after the contracted axis.
pub(crate) fn axis_split(extents: &[usize], axis: usize) -> (usize, usize) {
    let stride = extents[..axis].iter().product();
    let outer = extents[axis + 1..].iter().product();
    (stride, outer)
}
