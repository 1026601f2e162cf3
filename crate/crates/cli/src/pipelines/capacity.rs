//! Multiplexing capacity of the configured comb.

use afcoam::afc::{multimode_capacity, ModeCapacity};
use serde::{Deserialize, Serialize};

use super::{Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::ExperimentConfig;
use crate::error::CliResult;

#[derive(Debug, Serialize, Deserialize)]
struct CapacityRecord {
    bandwidth: f64,
    tooth_fwhm: f64,
    spectral_mode_bandwidth: f64,
    spatial_modes: u64,
    capacity: ModeCapacity,
}

pub fn execute(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let comb = cfg.section(&cfg.comb, "comb")?.build()?;
    let spec = cfg.section(&cfg.capacity, "capacity")?;
    let tooth_fwhm = comb.tooth_fwhm();
    let capacity = multimode_capacity(comb.bandwidth, tooth_fwhm, spec.spectral_mode_bandwidth, spec.spatial_modes)?;
    let record = CapacityRecord {
        bandwidth: comb.bandwidth,
        tooth_fwhm,
        spectral_mode_bandwidth: spec.spectral_mode_bandwidth,
        spatial_modes: spec.spatial_modes,
        capacity,
    };
    out.json("capacity", &record)?;
    Ok(Outcome::converged())
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let r: CapacityRecord = input.json("capacity")?;
    let c = multimode_capacity(r.bandwidth, r.tooth_fwhm, r.spectral_mode_bandwidth, r.spatial_modes)?;
    Ok(Metrics::from([
        ("temporal_modes".into(), c.temporal as f64),
        ("spectral_modes".into(), c.spectral as f64),
        ("spatial_modes".into(), c.spatial as f64),
        ("total_modes".into(), c.total as f64),
    ]))
}
