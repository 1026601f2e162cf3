//! Process tomography of the analysis setup with and without the memory.

use afcoam::afc::{ModeEfficiency, StorageChannel};
use afcoam::numerics::ComplexMatrix;
use afcoam::source::{tomography_kets, QUTRIT_LABELS};
use afcoam::tomography::{process_fidelity, process_tomography, ProcessMatrix, Tomographer};
use afcoam::DensityMatrix;
use serde_json::json;

use super::{non_convergence_flag, tomograph, Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::{AnalyzerSpec, ExperimentConfig};
use crate::error::CliResult;
use crate::rng::{Stage, Streams};

/// Imperfect analysis stage: depolarizing weight, then rotational jitter.
fn analyze(a: &AnalyzerSpec, rho: &DensityMatrix) -> CliResult<DensityMatrix> {
    let p = a.depolarizing;
    let mixed = &rho.matrix().scale_re(1.0 - p) + &ComplexMatrix::identity(3).scale_re(p / 3.0);
    let rho = DensityMatrix::single(mixed)?;
    if a.phase_jitter == 0.0 {
        return Ok(rho);
    }
    let jitter = StorageChannel { efficiency: ModeEfficiency::Uniform(1.0), phase_jitter: a.phase_jitter, delay: 0.0 };
    Ok(jitter.validated()?.apply_single(&rho, &QUTRIT_LABELS)?.state)
}

/// The two setups: `chi1` without the memory, `chi2` with it.
const SETUPS: [(&str, Stage); 2] = [("chi1", Stage::ReferenceProcessCounts), ("chi2", Stage::MemoryProcessCounts)];

pub fn execute(cfg: &ExperimentConfig, streams: &Streams, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let memory = cfg.qutrit_channel()?;
    let analyzer = cfg.analyzer();
    let inputs = tomography_kets();
    let t = Tomographer::single();
    let mut outcome = Outcome::converged();
    for (name, stage) in SETUPS {
        let mut rng = streams.rng(stage);
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut names = Vec::with_capacity(inputs.len());
        for (k, ket) in inputs.iter().enumerate() {
            let mut rho = ket.projector();
            if name == "chi2" {
                rho = memory.apply_single(&rho, &QUTRIT_LABELS)?.state;
            }
            let truth = analyze(&analyzer, &rho)?;
            let out_name = format!("{name}_out{k}");
            let (est, ok) = tomograph(&t, &cfg.mle(), &truth, cfg.exposure, cfg.background, &mut rng, out, &out_name)?;
            if !ok {
                outcome.converged = false;
                outcome.flags.push(non_convergence_flag(&format!("MLE of {out_name}")));
            }
            outputs.push(est);
            names.push(out_name);
        }
        let fit = process_tomography(&inputs, &outputs)?;
        if !fit.converged {
            outcome.converged = false;
            outcome.flags.push(non_convergence_flag(&format!("physical projection of {name}")));
        }
        let meta = json!({
            "source": "process-fit",
            "outputs": names,
            "alternations": fit.alternations,
            "tp_residual": fit.tp_residual,
            "converged": fit.converged,
        });
        out.matrix(name, &fit.process.chi, (9, 9), meta)?;
    }
    Ok(outcome)
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let chi1 = ProcessMatrix::new(input.matrix("chi1")?.matrix)?;
    let chi2 = ProcessMatrix::new(input.matrix("chi2")?.matrix)?;
    let chi0 = ProcessMatrix::identity();
    Ok(Metrics::from([
        ("fidelity_chi1_chi0".into(), process_fidelity(&chi1, &chi0)?),
        ("fidelity_chi2_chi0".into(), process_fidelity(&chi2, &chi0)?),
        ("fidelity_chi1_chi2".into(), process_fidelity(&chi1, &chi2)?),
        ("tp_residual_chi1".into(), chi1.trace_preservation_residual()),
        ("tp_residual_chi2".into(), chi2.trace_preservation_residual()),
    ]))
}
