//! Desk-scale model of storing OAM qutrit entanglement in an atomic frequency
//! comb memory: source states, the memory channel, photon-counting tomography
//! and entanglement certification.

// `!(x > lo)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod afc;
pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod source;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
pub use numerics::ComplexMatrix;
pub use state::DensityMatrix;
