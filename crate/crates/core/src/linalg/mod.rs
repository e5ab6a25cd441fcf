//! Dense Hermitian linear algebra: eigendecomposition, operator functions on
//! supports, Kronecker products and tensor powers, trace norms.

mod density;
mod eigen;
mod matrix;
mod symmetric;

pub use density::{DensityMatrix, TRACE_TOL};
pub use eigen::{
    eigenvalues, eigh, matrix_power_support, positive_part_trace, trace_norm,
    SpectralDecomposition, DEFAULT_GROUP_TOL, PSD_TOL, SUPPORT_CUTOFF,
};
pub(crate) use eigen::eigen_overlaps;
pub use matrix::{HermitianMatrix, DEFAULT_DIM_CAP};
pub use symmetric::{SymmetricBlock, SymmetricBlocks};
