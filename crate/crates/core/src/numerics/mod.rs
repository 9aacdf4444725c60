//! Special functions, bounded optimizers, the dense eigensolver and Welch's test.

pub mod eigen;
pub mod lambert;
pub mod optimize;
pub mod special;
pub mod ttest;

pub use eigen::{random_walk_laplacian, second_smallest_eigenvalue, symmetric_eigen, DenseMatrix, SymmetricEigen};
pub use lambert::lambert_w0;
pub use optimize::{
    maximize_box_constrained, maximize_scalar_bounded, BoxObjective, BoxOptimum, OptimizerConfig,
    ScalarOptimum,
};
pub use special::{incomplete_beta, ln_factorial, ln_gamma, student_t_two_sided};
pub use ttest::{welch_t_test, TTestResult};
