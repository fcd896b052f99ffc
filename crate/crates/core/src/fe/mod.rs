//! SIPG discretization of the Poisson problem on uniform Cartesian meshes of `[0,1]^d`.
//!
//! Global DoFs are numbered cell by cell (cells lexicographic, axis 0 fastest) and
//! lexicographically inside a cell. The operator is evaluated patch by patch: every
//! interior vertex contributes the Kronecker sum of ownership-partial 1D factors of
//! its `2^d` cells, so each cell and face integral is counted exactly once.

mod basis;
mod io;
mod mesh;
mod norms;
mod operator;
mod quadrature;
mod rhs;
mod sipg;

pub use basis::Basis1D;
pub use io::{read_vector_binary, read_vector_csv, write_vector_binary, write_vector_csv};
pub use mesh::{build_hierarchy, HierarchyConfig, Level, MeshHierarchy, Patch, DEFAULT_DOF_CAP};
pub use norms::{h1_seminorm_error, interpolate, l2_error};
pub use operator::{apply_operator, apply_operator_into, materialize_operator};
pub use quadrature::{gauss_lobatto_points, gauss_rule, QuadratureRule};
pub use rhs::assemble_rhs;
pub use sipg::{
    cell_matrices_1d, global_matrices_1d, owned_patch_matrices_1d, patch_matrices_1d, penalty, BoundaryKind,
    PatchMatrices1D, PenaltyParams,
};
