//! Dense complex linear algebra used throughout the crate.

pub mod eig;
pub mod matrix;
pub mod ops;
pub mod optim;
pub mod quad;
pub mod random;

pub use eig::{hermitian_eig, HermitianEig};
pub use matrix::{ComplexMatrix, MatrixJson};
pub use ops::{
    hermitian_solve, kron, kron_vec, matrix_sqrt_psd, partial_trace, partial_transpose,
    psd_projection, state_fidelity, trace_norm, Subsystem, PSD_TOL,
};
pub use optim::{nelder_mead, Minimum, NelderMeadOptions};
pub use quad::adaptive_simpson;
