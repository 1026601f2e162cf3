//! Pipelines. Each one has a producing half that simulates and writes
//! artifacts, and a measuring half that computes the summary metrics from
//! those artifacts alone; `verify` reruns the measuring half.

mod afc_echo;
mod bell;
mod capacity;
mod entanglement;
mod mode_scan;
mod process;
mod state_tomo;

use std::collections::BTreeMap;

use afcoam::tomography::{CountTable, MleData, MleOptions, TomoEstimate, Tomographer};
use afcoam::DensityMatrix;
use rand::Rng;
use serde_json::json;

use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::{ExperimentConfig, Pipeline};
use crate::error::CliResult;
use crate::report::Flag;
use crate::rng::Streams;

pub type Metrics = BTreeMap<String, f64>;

/// What the producing half reports besides its files.
#[derive(Debug, Default)]
pub struct Outcome {
    pub converged: bool,
    pub flags: Vec<Flag>,
}

impl Outcome {
    fn converged() -> Self {
        Self { converged: true, flags: Vec::new() }
    }
}

pub fn execute(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let streams = Streams::new(cfg.seed);
    match cfg.pipeline {
        Pipeline::EntanglementStorage => entanglement::execute(cfg, &streams, out),
        Pipeline::StateTomo => state_tomo::execute(cfg, &streams, out),
        Pipeline::ProcessTomo => process::execute(cfg, &streams, out),
        Pipeline::Bell => bell::execute(cfg, &streams, out),
        Pipeline::AfcEcho => afc_echo::execute(cfg, out),
        Pipeline::ModeScan => mode_scan::execute(cfg, out),
        Pipeline::Capacity => capacity::execute(cfg, out),
    }
}

pub fn metrics(cfg: &ExperimentConfig, input: &ArtifactReader) -> CliResult<Metrics> {
    match cfg.pipeline {
        Pipeline::EntanglementStorage => entanglement::metrics(input),
        Pipeline::StateTomo => state_tomo::metrics(cfg, input),
        Pipeline::ProcessTomo => process::metrics(input),
        Pipeline::Bell => bell::metrics(input),
        Pipeline::AfcEcho => afc_echo::metrics(input),
        Pipeline::ModeScan => mode_scan::metrics(input),
        Pipeline::Capacity => capacity::metrics(input),
    }
}

/// MLE estimate from a count table, started at the linear-inversion point.
pub fn reconstruct(table: &CountTable, opts: &MleOptions) -> CliResult<TomoEstimate> {
    let t = Tomographer::for_mode(table.mode);
    let init = t.linear_inversion(table)?;
    Ok(t.mle(&MleData::from_table(table), &init, opts)?)
}

/// Measures `truth` by tomography and writes the estimate as matrix
/// artifact `name`. Finite exposure simulates counts (written as
/// `counts_<name>`) and reconstructs by MLE; `None` records the exact state.
/// Returns the estimate and whether the reconstruction converged.
#[allow(clippy::too_many_arguments)]
pub(crate) fn tomograph<R: Rng + ?Sized>(
    t: &Tomographer,
    opts: &MleOptions,
    truth: &DensityMatrix,
    exposure: Option<u64>,
    background: f64,
    rng: &mut R,
    out: &mut ArtifactWriter,
    name: &str,
) -> CliResult<(DensityMatrix, bool)> {
    match exposure {
        None => {
            out.matrix(name, truth.matrix(), truth.dims(), json!({"source": "exact"}))?;
            Ok((truth.clone(), true))
        }
        Some(n) => {
            let table = t.simulate_counts(truth, n, background, rng)?;
            let counts = format!("counts_{name}");
            out.counts(&counts, &table)?;
            let est = reconstruct(&table, opts)?;
            let meta = json!({
                "source": "mle",
                "counts": counts,
                "background": background,
                "log_likelihood": est.log_likelihood,
                "iterations": est.iterations,
                "converged": est.converged,
            });
            out.matrix(name, est.rho.matrix(), est.rho.dims(), meta)?;
            Ok((est.rho, est.converged))
        }
    }
}

fn non_convergence_flag(what: &str) -> Flag {
    Flag::new(crate::report::FlagLevel::Error, "non-convergence", format!("{what} did not converge"))
}
