//! Run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Pipeline};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    /// `{"matrix", "dims", "metadata"}`
    Matrix,
    Counts,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    /// Relative to the report's directory.
    pub path: String,
    pub kind: ArtifactKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagLevel {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub level: FlagLevel,
    pub code: String,
    pub message: String,
}

impl Flag {
    pub fn new(level: FlagLevel, code: &str, message: impl Into<String>) -> Self {
        Self { level, code: code.into(), message: message.into() }
    }
}

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub pipeline: Pipeline,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Every value is recomputable from `artifacts` by `verify`.
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<Artifact>,
    pub flags: Vec<Flag>,
    /// False when an estimator or fit stopped before meeting its tolerance.
    pub converged: bool,
    pub wall_time_s: f64,
}

/// Compares metrics against the config's reference values. A gap beyond the
/// tolerance is a warning: the noise model is not expected to reproduce
/// every externally measured number.
pub fn reference_flags(cfg: &ExperimentConfig, metrics: &BTreeMap<String, f64>) -> Vec<Flag> {
    let mut flags = Vec::new();
    for (key, &reference) in &cfg.reference {
        match metrics.get(key) {
            None => flags.push(Flag::new(
                FlagLevel::Warning,
                "reference-unmatched",
                format!("reference {key} = {reference} names no metric of this pipeline"),
            )),
            Some(&value) => {
                let gap = value - reference;
                if gap.abs() > cfg.reference_tolerance {
                    flags.push(Flag::new(
                        FlagLevel::Warning,
                        "model-gap",
                        format!(
                            "{key}: model {value:.4} vs reference {reference:.4} (gap {gap:+.4}, tolerance {}); \
                             the configured noise model does not reproduce this value",
                            cfg.reference_tolerance
                        ),
                    ));
                } else {
                    flags.push(Flag::new(
                        FlagLevel::Info,
                        "reference-match",
                        format!("{key}: model {value:.4} vs reference {reference:.4} (gap {gap:+.4})"),
                    ));
                }
            }
        }
    }
    flags
}

/// `metric,value` lines.
pub fn metrics_csv(metrics: &BTreeMap<String, f64>) -> String {
    let mut out = String::from("metric,value\n");
    for (k, v) in metrics {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}
