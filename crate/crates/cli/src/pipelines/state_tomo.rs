//! Tomography of the source state alone.

use afcoam::entanglement::uhlmann_fidelity;
use afcoam::source::spdc_state;
use afcoam::tomography::{MleData, Tomographer};
use serde_json::json;

use super::entanglement::state_metrics;
use super::{non_convergence_flag, tomograph, Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::rng::{Stage, Streams};

pub fn execute(cfg: &ExperimentConfig, streams: &Streams, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let truth = spdc_state(cfg.section(&cfg.source, "source")?)?;
    out.matrix("rho_true", truth.matrix(), truth.dims(), json!({"source": "model"}))?;
    let t = Tomographer::bipartite();
    let (_, ok) = tomograph(&t, &cfg.mle(), &truth, cfg.exposure, cfg.background, &mut streams.rng(Stage::SourceCounts), out, "rho")?;
    let mut outcome = Outcome::converged();
    if !ok {
        outcome.converged = false;
        outcome.flags.push(non_convergence_flag("MLE of rho"));
    }
    Ok(outcome)
}

pub fn metrics(cfg: &ExperimentConfig, input: &ArtifactReader) -> CliResult<Metrics> {
    let rho = input.matrix("rho")?;
    let truth = input.matrix("rho_true")?.density()?;
    let est = rho.density()?;
    let mut m = Metrics::new();
    state_metrics(&mut m, &est, "rho")?;
    m.insert("fidelity_to_model".into(), uhlmann_fidelity(&est, &truth)?);
    if let Some(counts) = rho.metadata.get("counts").and_then(|c| c.as_str()) {
        let table = input.counts(counts, cfg.background)?;
        let ll = Tomographer::for_mode(table.mode).log_likelihood(&MleData::from_table(&table), est.matrix());
        m.insert("log_likelihood".into(), ll);
    }
    Ok(m)
}
