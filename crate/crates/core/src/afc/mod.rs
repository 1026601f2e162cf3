//! Atomic-frequency-comb memory: comb spectrum, echo propagation, transverse
//! preparation and the resulting storage channel.

pub mod capacity;
pub mod channel;
pub mod comb;
pub mod echo;
pub mod spatial;

pub use capacity::{multimode_capacity, ModeCapacity};
pub use channel::{calibrate_phase_jitter, visibility, ChannelOutput, ModeEfficiency, StorageChannel};
pub use comb::{build_comb, CombProfile, FrequencyGrid, ToothShape, TransferFunction, transfer_function};
pub use echo::{
    analytic_efficiency, echo_window_half_width, measure_echo, propagate_echo, EchoMeasurement, EchoResult,
    OpticalPulse,
};
pub use spatial::{effective_depth, mode_efficiency, prepared_depth_map, PumpProfile, PumpShape, ToothParams};
