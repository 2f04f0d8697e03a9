//! Mittag-Leffler functions E_{β,γ} for complex scalars and small matrices.

pub mod dd;
mod gamma;
mod matrix;
mod mittag_leffler;

pub use gamma::{gamma, ln_gamma, reciprocal_gamma};
pub use matrix::{complex_eigenvalues, ml_matrix, CMatrix, MatrixMl};
pub use mittag_leffler::{
    f_lambda, f_lambda_with, is_exponential_sum, ml_asymptotic, ml_eval, ml_series, near_stokes,
    principal_pow, MLParams, MittagLeffler, SeriesValue,
};
