//! Small dense linear-algebra kernels used across the crate.

mod cmatrix;
mod eigen;

pub use cmatrix::ComplexMatrix;
pub use eigen::SymmetricEigen;
