//! Echo of a single pulse, optionally with the simulated-vs-closed-form sweep.

use afcoam::afc::{
    analytic_efficiency, build_comb, echo_window_half_width, measure_echo, propagate_echo, OpticalPulse, ToothShape,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Metrics, Outcome};
use crate::artifacts::{ArtifactReader, ArtifactWriter};
use crate::config::{CombSpec, ExperimentConfig};
use crate::error::{CliError, CliResult};

pub const SWEEP_FINESSES: [f64; 4] = [2.0, 3.0, 5.0, 10.0];
pub const SWEEP_DEPTHS: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 4.0];
pub const SWEEP_SHAPES: [ToothShape; 2] = [ToothShape::Square, ToothShape::Gaussian];

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    time_s: f64,
    re: f64,
    im: f64,
    abs2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EchoRecord {
    comb: CombSpec,
    dt: f64,
    input_centroid: f64,
    window_half_width: f64,
    storage_time: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SweepRow {
    shape: ToothShape,
    finesse: f64,
    depth: f64,
    eta_fft: f64,
    eta_analytic: f64,
    t_echo: f64,
    dt: f64,
}

pub fn execute(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Outcome> {
    let spec = cfg.section(&cfg.comb, "comb")?;
    let pulse_spec = cfg.pulse.unwrap_or_default();
    let comb = spec.build()?;
    let pulse = OpticalPulse::gaussian_for(&comb, pulse_spec.duration, pulse_spec.center_offset)?;
    let r = propagate_echo(&pulse, &comb)?;
    let trace: Vec<TraceRow> = r
        .output
        .iter()
        .enumerate()
        .map(|(k, z)| TraceRow { time_s: k as f64 * r.dt, re: z.re, im: z.im, abs2: z.norm_sqr() })
        .collect();
    out.csv("echo_trace", &trace)?;
    out.json(
        "echo",
        &EchoRecord {
            comb: spec.clone(),
            dt: r.dt,
            input_centroid: r.input_centroid,
            window_half_width: echo_window_half_width(&comb, pulse_spec.duration),
            storage_time: comb.storage_time(),
        },
    )?;

    if pulse_spec.sweep {
        let grid: Vec<(ToothShape, f64, f64)> = SWEEP_SHAPES
            .iter()
            .flat_map(|&s| SWEEP_FINESSES.iter().flat_map(move |&f| SWEEP_DEPTHS.iter().map(move |&d| (s, f, d))))
            .collect();
        let rows = grid
            .par_iter()
            .map(|&(shape, finesse, depth)| -> CliResult<SweepRow> {
                let c = build_comb(spec.spacing, finesse, depth, spec.background_depth, spec.bandwidth, shape)?;
                let p = OpticalPulse::gaussian_for(&c, pulse_spec.duration, pulse_spec.center_offset)?;
                let e = propagate_echo(&p, &c)?;
                Ok(SweepRow {
                    shape,
                    finesse,
                    depth,
                    eta_fft: e.efficiency,
                    eta_analytic: analytic_efficiency(finesse, depth, spec.background_depth, shape)?,
                    t_echo: e.echo_time,
                    dt: e.dt,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        out.csv("efficiency_sweep", &rows)?;
    }
    Ok(Outcome::converged())
}

pub fn metrics(input: &ArtifactReader) -> CliResult<Metrics> {
    let rec: EchoRecord = input.json("echo")?;
    let trace: Vec<TraceRow> = input.csv("echo_trace")?;
    let intensity: Vec<f64> = trace.iter().map(|r| r.abs2).collect();
    let e = measure_echo(&intensity, rec.dt, rec.input_centroid, rec.window_half_width, rec.storage_time)?;
    let c = &rec.comb;
    let mut m = Metrics::from([
        ("efficiency".into(), e.efficiency),
        ("echo_time".into(), e.echo_time),
        ("echo_time_error_steps".into(), (e.echo_time - rec.storage_time) / rec.dt),
        ("efficiency_analytic".into(), analytic_efficiency(c.finesse, c.peak_depth, c.background_depth, c.shape)?),
        ("output_energy".into(), e.output_energy),
        ("time_step".into(), rec.dt),
    ]);
    if input.exists("efficiency_sweep.csv") {
        let rows: Vec<SweepRow> = input.csv("efficiency_sweep")?;
        if rows.is_empty() {
            return Err(CliError::artifact("efficiency_sweep.csv", "no rows"));
        }
        let max_diff = rows.iter().map(|r| (r.eta_fft - r.eta_analytic).abs()).fold(0.0, f64::max);
        // echoes too weak to locate are excluded from the timing check
        let max_steps = rows
            .iter()
            .filter(|r| r.eta_fft > 1e-4)
            .map(|r| ((r.t_echo - rec.storage_time) / r.dt).abs())
            .fold(0.0, f64::max);
        m.insert("sweep_max_abs_diff".into(), max_diff);
        m.insert("sweep_max_echo_time_error_steps".into(), max_steps);
        m.insert("sweep_points".into(), rows.len() as f64);
    }
    Ok(m)
}
