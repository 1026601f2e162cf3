//! Recomputes a report's metrics from its persisted artifacts.

use std::fs;
use std::path::Path;

use afcoam::tomography::process_tomography;
use afcoam::source::tomography_kets;
use serde::{Deserialize, Serialize};

use crate::artifacts::ArtifactReader;
use crate::error::{CliError, CliResult};
use crate::pipelines::{self, reconstruct};
use crate::report::{ArtifactKind, RunReport};

pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub item: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verification {
    pub metrics_checked: usize,
    pub artifacts_rederived: usize,
    /// Largest absolute metric difference seen.
    pub max_difference: f64,
    pub discrepancies: Vec<Discrepancy>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

pub fn load_report(path: &Path) -> CliResult<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::artifact(path, e))
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOLERANCE || (a.is_nan() && b.is_nan()) || a == b
}

/// Re-derives every MLE estimate from its count table and every process fit
/// from its output states, comparing with the stored matrices.
fn rederive(report: &RunReport, input: &ArtifactReader, found: &mut Vec<Discrepancy>) -> CliResult<usize> {
    let mut n = 0;
    for a in report.artifacts.iter().filter(|a| a.kind == ArtifactKind::Matrix) {
        let stored = input.matrix(&a.name)?;
        let meta = &stored.metadata;
        let rebuilt = match meta.get("source").and_then(|s| s.as_str()) {
            Some("mle") => {
                let counts = meta.get("counts").and_then(|c| c.as_str()).ok_or_else(|| {
                    CliError::artifact(&a.path, "MLE estimate does not name its count table")
                })?;
                let background = meta.get("background").and_then(|b| b.as_f64()).unwrap_or(0.0);
                reconstruct(&input.counts(counts, background)?, &report.config.mle())?.rho.into_matrix()
            }
            Some("process-fit") => {
                let names = meta.get("outputs").and_then(|o| o.as_array()).ok_or_else(|| {
                    CliError::artifact(&a.path, "process fit does not name its output states")
                })?;
                let outputs = names
                    .iter()
                    .map(|v| {
                        let name = v.as_str().ok_or_else(|| CliError::artifact(&a.path, "output name is not a string"))?;
                        input.matrix(name)?.density()
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                process_tomography(&tomography_kets(), &outputs)?.process.chi
            }
            _ => continue,
        };
        n += 1;
        let diff = rebuilt.max_abs_diff(&stored.matrix);
        if !(diff <= VERIFY_TOLERANCE) {
            found.push(Discrepancy {
                item: a.path.clone(),
                message: format!("re-derived matrix differs by {diff:e}"),
            });
        }
    }
    Ok(n)
}

pub fn verify_report(path: &Path) -> CliResult<Verification> {
    let report = load_report(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let input = ArtifactReader::new(dir);
    let mut found = Vec::new();
    for a in &report.artifacts {
        if !input.exists(&a.path) {
            found.push(Discrepancy { item: a.path.clone(), message: "artifact missing".into() });
        }
    }
    if !found.is_empty() {
        return Ok(Verification { metrics_checked: 0, artifacts_rederived: 0, max_difference: f64::NAN, discrepancies: found });
    }

    let rederived = rederive(&report, &input, &mut found)?;
    let recomputed = pipelines::metrics(&report.config, &input)?;
    let mut max_difference: f64 = 0.0;
    for (key, &value) in &report.metrics {
        match recomputed.get(key) {
            None => found.push(Discrepancy { item: key.clone(), message: "not recomputable from artifacts".into() }),
            Some(&r) => {
                if !same(value, r) {
                    found.push(Discrepancy { item: key.clone(), message: format!("reported {value}, recomputed {r}") });
                }
                if value.is_finite() && r.is_finite() {
                    max_difference = max_difference.max((value - r).abs());
                }
            }
        }
    }
    for key in recomputed.keys().filter(|k| !report.metrics.contains_key(*k)) {
        found.push(Discrepancy { item: key.clone(), message: "recomputed metric absent from report".into() });
    }
    Ok(Verification {
        metrics_checked: report.metrics.len(),
        artifacts_rederived: rederived,
        max_difference,
        discrepancies: found,
    })
}
