//! Photon-counting state and process tomography for qutrits.

pub mod basis;
pub mod counts;
pub mod process;
pub mod reconstruct;

pub use basis::{qutrit_operator_basis, traceless_hermitian_basis};
pub use counts::{sample_counts, CountRow, CountTable, TomoMode};
pub use process::{process_fidelity, process_tomography, ProcessFit, ProcessMatrix};
pub use reconstruct::{
    linear_inversion, mle_reconstruct, simulate_counts, MleData, MleOptions, TomoEstimate, Tomographer,
};
