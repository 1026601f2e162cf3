//! Experiment configuration files.

use std::collections::BTreeMap;
use std::path::PathBuf;

use afcoam::afc::{
    analytic_efficiency, build_comb, calibrate_phase_jitter, mode_efficiency, CombProfile, ModeEfficiency, PumpProfile,
    StorageChannel, ToothParams, ToothShape,
};
use afcoam::numerics::Subsystem;
use afcoam::source::{LgProfile, SpdcSpec, QUTRIT_LABELS};
use afcoam::tomography::MleOptions;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    EntanglementStorage,
    StateTomo,
    ProcessTomo,
    Bell,
    AfcEcho,
    ModeScan,
    Capacity,
}

impl Pipeline {
    pub const ALL: [Pipeline; 7] = [
        Self::EntanglementStorage,
        Self::StateTomo,
        Self::ProcessTomo,
        Self::Bell,
        Self::AfcEcho,
        Self::ModeScan,
        Self::Capacity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::EntanglementStorage => "entanglement-storage",
            Self::StateTomo => "state-tomo",
            Self::ProcessTomo => "process-tomo",
            Self::Bell => "bell",
            Self::AfcEcho => "afc-echo",
            Self::ModeScan => "mode-scan",
            Self::Capacity => "capacity",
        }
    }

    /// Top-level sections that must be present.
    pub fn required_sections(self) -> &'static [&'static str] {
        match self {
            Self::EntanglementStorage => &["source", "channel"],
            Self::StateTomo => &["source"],
            Self::ProcessTomo => &["channel"],
            Self::Bell => &["source"],
            Self::AfcEcho => &["comb"],
            Self::ModeScan => &["scan", "channel"],
            Self::Capacity => &["comb", "capacity"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub pipeline: Pipeline,
    pub seed: u64,
    /// Trials per tomography setting; `null` means infinite statistics.
    #[serde(default)]
    pub exposure: Option<u64>,
    /// Mean accidental counts per setting.
    #[serde(default)]
    pub background: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SpdcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comb: Option<CombSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyzer: Option<AnalyzerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bell: Option<BellSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    /// Maximum-likelihood estimator settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mle: Option<MleOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<CapacitySpec>,
    /// Externally measured values the model is compared against.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reference: BTreeMap<String, f64>,
    /// Absolute gap above which a reference mismatch is flagged.
    #[serde(default = "default_reference_tolerance")]
    pub reference_tolerance: f64,
}

fn default_reference_tolerance() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSpec {
    /// Tooth spacing Δ (Hz).
    pub spacing: f64,
    pub finesse: f64,
    pub peak_depth: f64,
    #[serde(default)]
    pub background_depth: f64,
    /// Comb bandwidth B (Hz).
    pub bandwidth: f64,
    #[serde(default = "default_shape")]
    pub shape: ToothShape,
}

fn default_shape() -> ToothShape {
    ToothShape::Square
}

impl CombSpec {
    pub fn build(&self) -> Result<CombProfile, CliError> {
        Ok(build_comb(self.spacing, self.finesse, self.peak_depth, self.background_depth, self.bandwidth, self.shape)?)
    }

    pub fn teeth(&self) -> ToothParams {
        ToothParams { finesse: self.finesse, background_depth: self.background_depth, shape: self.shape }
    }

    pub fn efficiency(&self) -> Result<f64, CliError> {
        Ok(analytic_efficiency(self.finesse, self.peak_depth, self.background_depth, self.shape)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityTarget {
    pub visibility: f64,
    pub l: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Explicit recall efficiency; otherwise derived from the comb (and pump).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<ModeEfficiency>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_jitter: Option<f64>,
    /// Solve the phase jitter from a target readout visibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<VisibilityTarget>,
    #[serde(default = "default_stored")]
    pub stored: Subsystem,
}

fn default_stored() -> Subsystem {
    Subsystem::B
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    /// Intensity FWHM (s).
    pub duration: f64,
    #[serde(default)]
    pub center_offset: f64,
    /// Also compare simulated and closed-form efficiency over the standard grid.
    #[serde(default)]
    pub sweep: bool,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self { duration: 6e-9, center_offset: 0.0, sweep: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzerSpec {
    /// Depolarizing weight of the analysis stage.
    #[serde(default)]
    pub depolarizing: f64,
    /// Rotational phase jitter of the analysis stage (rad).
    #[serde(default)]
    pub phase_jitter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellSpec {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_true")]
    pub refine: bool,
    /// Trials per projector for a counted S estimate.
    #[serde(default)]
    pub exposure: Option<u64>,
}

fn default_restarts() -> usize {
    20
}

fn default_true() -> bool {
    true
}

impl Default for BellSpec {
    fn default() -> Self {
        Self { restarts: default_restarts(), refine: true, exposure: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub l_min: i32,
    pub l_max: i32,
    /// LG waist of the stored modes (mm).
    #[serde(default = "default_mode_waist")]
    pub mode_waist: f64,
}

fn default_mode_waist() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySpec {
    pub spectral_mode_bandwidth: f64,
    pub spatial_modes: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(vec![crate::validate::Finding::error("", e.to_string())]))
    }

    pub fn section<'a, T>(&self, value: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| CliError::Validation(vec![crate::validate::Finding::error(format!("/{name}"), format!("section required by {}", self.pipeline.name()))]))
    }

    pub fn channel_spec(&self) -> Result<&ChannelSpec, CliError> {
        self.section(&self.channel, "channel")
    }

    /// Efficiency of mode `l`: explicit, from the pump map, or from the comb.
    pub fn mode_efficiency(&self, l: i32) -> Result<f64, CliError> {
        let ch = self.channel_spec()?;
        if let Some(e) = &ch.efficiency {
            return Ok(e.get(l)?);
        }
        match (&self.comb, &self.pump) {
            (Some(comb), Some(pump)) => {
                let waist = self.scan.map_or(default_mode_waist(), |s| s.mode_waist);
                Ok(mode_efficiency(pump, &comb.teeth(), &LgProfile::new(l, waist))?)
            }
            (Some(comb), None) => comb.efficiency(),
            _ => Ok(1.0),
        }
    }

    pub fn phase_jitter(&self) -> Result<f64, CliError> {
        let ch = self.channel_spec()?;
        match (ch.phase_jitter, ch.calibrate) {
            (Some(s), _) => Ok(s),
            (None, Some(t)) => Ok(calibrate_phase_jitter(t.visibility, t.l)?),
            (None, None) => Ok(0.0),
        }
    }

    /// Storage channel acting on the qutrit labels `-1, 0, 1`.
    pub fn qutrit_channel(&self) -> Result<StorageChannel, CliError> {
        let table = QUTRIT_LABELS.iter().map(|&l| Ok((l, self.mode_efficiency(l)?))).collect::<Result<_, CliError>>()?;
        let spacing = self.comb.as_ref().map_or(25e6, |c| c.spacing);
        Ok(StorageChannel::new(ModeEfficiency::PerMode(table), self.phase_jitter()?, spacing)?)
    }

    pub fn analyzer(&self) -> AnalyzerSpec {
        self.analyzer.unwrap_or_default()
    }

    pub fn mle(&self) -> MleOptions {
        self.mle.unwrap_or_default()
    }

    pub fn bell(&self) -> BellSpec {
        self.bell.unwrap_or_default()
    }
}
