//! CGLMP test on the source state.

use afcoam::entanglement::{bell_from_counts, cglmp_value, BellCounts, BellResult};
use afcoam::source::spdc_state;
use serde_json::json;

use super::entanglement::bell_search;
use super::{non_convergence_flag, Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::rng::{Stage, Streams};

pub fn execute(cfg: &ExperimentConfig, streams: &Streams, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let rho = spdc_state(cfg.section(&cfg.source, "source")?)?;
    out.matrix("rho", rho.matrix(), rho.dims(), json!({"source": "model"}))?;
    let r = bell_search(cfg, &rho, streams.seed(Stage::SourceBellSearch))?;
    let mut outcome = Outcome::converged();
    if !r.converged {
        outcome.converged = false;
        outcome.flags.push(non_convergence_flag("Bell search"));
    }
    if let Some(n) = cfg.bell().exposure {
        let counts = BellCounts::simulate(&rho, &r.settings, n, &mut streams.rng(Stage::BellCounts))?;
        out.json("bell_counts", &counts)?;
    }
    out.json("bell", &r)?;
    Ok(outcome)
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let rho = input.matrix("rho")?.density()?;
    let bell: BellResult = input.json("bell")?;
    let mut m = Metrics::new();
    m.insert("S".into(), cglmp_value(&rho, &bell.settings)?.s);
    if input.exists("bell_counts.json") {
        let counts: BellCounts = input.json("bell_counts")?;
        let r = bell_from_counts(&counts, &bell.settings)?;
        m.insert("S_counts".into(), r.s);
        if let Some(se) = r.stderr {
            m.insert("S_counts_stderr".into(), se);
        }
    }
    Ok(m)
}
