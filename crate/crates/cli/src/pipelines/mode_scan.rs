//! Readout visibility and recall efficiency across OAM modes.

use std::collections::BTreeMap;

use afcoam::afc::{visibility, ModeEfficiency, StorageChannel};
use afcoam::source::{superposition_state, Sign};
use serde::{Deserialize, Serialize};

use super::{Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
struct ScanRow {
    l: i32,
    /// Empty for `l = 0`, where `|psi_±(l)>` is undefined.
    visibility_before: Option<f64>,
    visibility_after: Option<f64>,
    efficiency: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScanRecord {
    memory_phase_jitter: f64,
    analyzer_phase_jitter: f64,
}

/// `|psi_+(l)>` through `stages`, then projected on `|psi_±(l)>`.
fn readout_visibility(l: i32, stages: &[&StorageChannel]) -> CliResult<f64> {
    let plus = superposition_state(l, Sign::Plus)?;
    let minus = superposition_state(l, Sign::Minus)?;
    let labels = plus.single_labels();
    let mut rho = plus.projector();
    for s in stages {
        rho = s.apply_single(&rho, &labels)?.state;
    }
    Ok(visibility(rho.probability(plus.amplitudes()), rho.probability(minus.amplitudes()))?)
}

pub fn execute(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let scan = cfg.section(&cfg.scan, "scan")?;
    let spacing = cfg.comb.as_ref().map_or(25e6, |c| c.spacing);
    let etas: BTreeMap<i32, f64> =
        (scan.l_min..=scan.l_max).map(|l| Ok((l, cfg.mode_efficiency(l)?))).collect::<CliResult<_>>()?;
    let table: BTreeMap<i32, f64> = etas.iter().flat_map(|(&l, &e)| [(l, e), (-l, e)]).collect();
    let sigma = cfg.phase_jitter()?;
    let memory = StorageChannel::new(ModeEfficiency::PerMode(table), sigma, spacing)?;
    let analyzer_sigma = cfg.analyzer().phase_jitter;
    let analyzer =
        StorageChannel { efficiency: ModeEfficiency::Uniform(1.0), phase_jitter: analyzer_sigma, delay: 0.0 }.validated()?;

    let rows = etas
        .iter()
        .map(|(&l, &efficiency)| {
            let (before, after) = if l == 0 {
                (None, None)
            } else {
                (Some(readout_visibility(l, &[&analyzer])?), Some(readout_visibility(l, &[&memory, &analyzer])?))
            };
            Ok(ScanRow { l, visibility_before: before, visibility_after: after, efficiency })
        })
        .collect::<CliResult<Vec<_>>>()?;
    out.csv("mode_scan", &rows)?;
    out.json("scan", &ScanRecord { memory_phase_jitter: sigma, analyzer_phase_jitter: analyzer_sigma })?;
    Ok(Outcome::converged())
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let rows: Vec<ScanRow> = input.csv("mode_scan")?;
    let rec: ScanRecord = input.json("scan")?;
    if rows.is_empty() {
        return Err(CliError::artifact("mode_scan.csv", "no rows"));
    }
    let mut m = Metrics::new();
    m.insert("memory_phase_jitter".into(), rec.memory_phase_jitter);
    for r in &rows {
        m.insert(format!("efficiency_l{}", r.l), r.efficiency);
        if let (Some(b), Some(a)) = (r.visibility_before, r.visibility_after) {
            m.insert(format!("visibility_before_l{}", r.l), b);
            m.insert(format!("visibility_after_l{}", r.l), a);
        }
    }
    let (lo, hi) = rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.efficiency), hi.max(r.efficiency)));
    m.insert("efficiency_spread".into(), hi - lo);
    let after: Vec<f64> = rows.iter().filter_map(|r| r.visibility_after).collect();
    if let Some(min) = after.iter().copied().reduce(f64::min) {
        m.insert("visibility_after_min".into(), min);
        // > 0 would mean visibility grows with l somewhere
        let rise = after.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        if rise.is_finite() {
            m.insert("visibility_after_max_rise".into(), rise);
        }
    }
    Ok(m)
}
