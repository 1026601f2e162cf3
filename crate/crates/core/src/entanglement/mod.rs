//! Entanglement certification for qutrit pairs.

pub mod cglmp;
pub mod measures;
pub mod optimize;

pub use cglmp::{
    bell_from_counts, cglmp_from_joint, cglmp_value, joint_probabilities, phased_fourier, shifted_fourier,
    BellCounts, BellResult, BellSettings, SettingsFamily, SETTING_PAIRS,
};
pub use measures::{fidelity_to_mes, isotropic_state, negativity, uhlmann_fidelity};
pub use optimize::{optimize_cglmp, OptimizerOptions};
