//! Batch driver: runs configured pipelines, persists their artifacts and
//! reports, and verifies reports against those artifacts.

// `!(x > lo)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod error;
pub mod pipelines;
pub mod presets;
pub mod report;
pub mod rng;
pub mod validate;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use artifacts::{ArtifactReader, ArtifactWriter};
pub use config::{ExperimentConfig, Pipeline};
pub use error::{CliError, CliResult};
use report::{reference_flags, RunReport, REPORT_FILE};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "AFCOAM_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "afcoam-runs";

/// Reads and validates a config file; error-level findings abort.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let findings = validate::validate_text(text);
    if validate::has_errors(&findings) {
        return Err(CliError::Validation(findings));
    }
    ExperimentConfig::from_json(text)
}

/// Output root: the explicit flag, else the config's `output_dir`, else the
/// environment variable, else `./afcoam-runs`.
pub fn resolve_out_root(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs are never overwritten: each gets the next free
/// `<pipeline>-seed<seed>-<n>` directory under the root.
fn new_run_dir(root: &Path, cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    for n in 0..100_000 {
        let dir = root.join(format!("{}-seed{}-{n:03}", cfg.pipeline.name(), cfg.seed));
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(CliError::io(&dir, e)),
        }
    }
    Err(CliError::Runtime(format!("no free run directory under {}", root.display())))
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub report_path: PathBuf,
}

/// Executes the pipeline, then computes every metric from the files it wrote.
pub fn run(cfg: &ExperimentConfig, out_root: &Path) -> CliResult<RunOutput> {
    let start = Instant::now();
    let dir = new_run_dir(out_root, cfg)?;
    let mut writer = ArtifactWriter::new(&dir);
    let outcome = pipelines::execute(cfg, &mut writer)?;
    let metrics = pipelines::metrics(cfg, &ArtifactReader::new(&dir))?;
    let mut flags = outcome.flags;
    flags.extend(reference_flags(cfg, &metrics));
    let report = RunReport {
        schema_version: config::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        pipeline: cfg.pipeline,
        seed: cfg.seed,
        config: cfg.clone(),
        metrics,
        artifacts: writer.into_artifacts(),
        flags,
        converged: outcome.converged,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let report_path = dir.join(REPORT_FILE);
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&report_path, text).map_err(|e| CliError::io(&report_path, e))?;
    Ok(RunOutput { report, report_path })
}
