//! Problem representation and the linear-algebra kernels every solver shares.

pub mod io;
pub mod iterate;
pub mod linalg;
pub mod matrix;
pub mod problem;

pub use iterate::{Certificate, SparseIterate};
pub use linalg::{soft_threshold, spectral_norm_sq, LinearOperator};
pub use matrix::{ColumnSubset, DesignMatrix};
pub use problem::LassoProblem;
