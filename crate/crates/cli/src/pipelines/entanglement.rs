//! Pair state before and after storage of one photon.

use afcoam::afc::StorageChannel;
use afcoam::entanglement::{cglmp_value, fidelity_to_mes, negativity, optimize_cglmp, uhlmann_fidelity, BellResult, OptimizerOptions};
use afcoam::numerics::Subsystem;
use afcoam::source::spdc_state;
use afcoam::tomography::Tomographer;
use afcoam::DensityMatrix;
use serde::{Deserialize, Serialize};

use super::{non_convergence_flag, tomograph, Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::rng::{Stage, Streams};

#[derive(Debug, Serialize, Deserialize)]
struct ChannelRecord {
    channel: StorageChannel,
    stored: Subsystem,
    herald: f64,
    /// Trials per setting after storage (exposure times herald).
    stored_exposure: Option<u64>,
}

pub(super) fn bell_search(cfg: &ExperimentConfig, rho: &DensityMatrix, seed: u64) -> CliResult<BellResult> {
    let b = cfg.bell();
    let opts = OptimizerOptions { restarts: b.restarts, seed, refine: b.refine, ..Default::default() };
    Ok(optimize_cglmp(rho, &opts)?)
}

pub fn execute(cfg: &ExperimentConfig, streams: &Streams, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let source = spdc_state(cfg.section(&cfg.source, "source")?)?;
    let stored = cfg.channel_spec()?.stored;
    let channel = cfg.qutrit_channel()?;
    let after = channel.apply_pair(&source, stored)?;
    // lost photons never reach the analyzer
    let stored_exposure = cfg.exposure.map(|n| ((n as f64 * after.herald).round() as u64).max(1));
    out.json("channel", &ChannelRecord { channel, stored, herald: after.herald, stored_exposure })?;

    let t = Tomographer::bipartite();
    let mut outcome = Outcome::converged();
    let (rho1, ok1) =
        tomograph(&t, &cfg.mle(), &source, cfg.exposure, cfg.background, &mut streams.rng(Stage::SourceCounts), out, "rho1")?;
    let (rho2, ok2) =
        tomograph(&t, &cfg.mle(), &after.state, stored_exposure, cfg.background, &mut streams.rng(Stage::StoredCounts), out, "rho2")?;
    for (ok, name) in [(ok1, "MLE of rho1"), (ok2, "MLE of rho2")] {
        if !ok {
            outcome.converged = false;
            outcome.flags.push(non_convergence_flag(name));
        }
    }

    for (rho, name, stage) in [(&rho1, "bell_rho1", Stage::SourceBellSearch), (&rho2, "bell_rho2", Stage::StoredBellSearch)] {
        let r = bell_search(cfg, rho, streams.seed(stage))?;
        if !r.converged {
            outcome.converged = false;
            outcome.flags.push(non_convergence_flag(&format!("Bell search for {name}")));
        }
        out.json(name, &r)?;
    }
    Ok(outcome)
}

pub fn state_metrics(m: &mut Metrics, rho: &DensityMatrix, suffix: &str) -> CliResult<()> {
    let f = fidelity_to_mes(rho)?;
    m.insert(format!("negativity_{suffix}"), negativity(rho)?);
    m.insert(format!("fidelity_mes_{suffix}"), f);
    m.insert(format!("mes_visibility_{suffix}"), (9.0 * f - 1.0) / 8.0);
    m.insert(format!("purity_{suffix}"), rho.purity());
    Ok(())
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let rho1 = input.matrix("rho1")?.density()?;
    let rho2 = input.matrix("rho2")?.density()?;
    let channel: ChannelRecord = input.json("channel")?;
    let mut m = Metrics::new();
    state_metrics(&mut m, &rho1, "rho1")?;
    state_metrics(&mut m, &rho2, "rho2")?;
    for (rho, name) in [(&rho1, "rho1"), (&rho2, "rho2")] {
        let bell: BellResult = input.json(&format!("bell_{name}"))?;
        m.insert(format!("S_{name}"), cglmp_value(rho, &bell.settings)?.s);
    }
    m.insert("fidelity_rho1_rho2".into(), uhlmann_fidelity(&rho2, &rho1)?);
    m.insert("herald".into(), channel.herald);
    Ok(m)
}
