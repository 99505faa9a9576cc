//! Dense complex linear algebra over tensor-factored Hilbert spaces.

mod eigen;
pub mod io;
mod matrix;
mod operator;
mod space;

pub use eigen::{
    checked_hermitian, hermitian_eigensystem, min_eigenvalue, rayleigh_max, schmidt_coefficients,
    schmidt_rank, Eigensystem, RayleighMax, HERMITIAN_TOL, PSD_TOL, SCHMIDT_TOL,
};
pub(crate) use eigen::{eigensystem_unchecked, rayleigh_max_unchecked};
pub use matrix::{ComplexMatrix, ONE, ZERO};
pub use operator::{
    partial_trace, partial_transpose, tensor_product, DensityOperator, Operator, TensorProduct,
    NORMALIZATION_TOL,
};
pub use space::{Factor, HilbertFactorization, Party, DEFAULT_MAX_DIM};
