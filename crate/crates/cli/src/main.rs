use std::path::PathBuf;
use std::process::ExitCode;

use afcoam_cli::error::{CliError, CliResult};
use afcoam_cli::report::metrics_csv;
use afcoam_cli::validate::{has_errors, validate_text, Finding};
use afcoam_cli::verify::verify_report;
use afcoam_cli::{load_config, presets, resolve_out_root, run};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "afcoam", version, about = "Simulated OAM entanglement storage experiments")]
struct Cli {
    /// Override the config's root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root (default: config output_dir, then $AFCOAM_OUT_DIR, then ./afcoam-runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Format of what is printed to stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline described by a config file.
    Run { config: PathBuf },
    /// Check a config file and list findings.
    Validate { config: PathBuf },
    /// Recompute a report's metrics from its artifacts.
    Verify { report: PathBuf },
    /// Shipped configurations.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Subcommand)]
enum PresetAction {
    List,
    Emit { name: String },
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Runtime(e.to_string()))
}

fn print_findings(findings: &[Finding], format: Format) -> CliResult<()> {
    match format {
        Format::Json => println!("{}", to_json(&findings)?),
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(std::io::stdout());
            for f in findings {
                wr.serialize(f).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            wr.flush().map_err(|e| CliError::io("stdout", e))?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = load_config(config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let out = run(&cfg, &resolve_out_root(cli.out.as_deref(), &cfg))?;
            match cli.format {
                Format::Json => println!("{}", to_json(&out.report)?),
                Format::Csv => print!("{}", metrics_csv(&out.report.metrics)),
            }
            eprintln!("report written to {}", out.report_path.display());
            for f in &out.report.flags {
                eprintln!("{:?} [{}] {}", f.level, f.code, f.message);
            }
            Ok(if out.report.converged { 0 } else { 3 })
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config, e))?;
            let findings = validate_text(&text);
            print_findings(&findings, cli.format)?;
            Ok(if has_errors(&findings) { 1 } else { 0 })
        }
        Command::Verify { report } => {
            let v = verify_report(report)?;
            match cli.format {
                Format::Json => println!("{}", to_json(&v)?),
                Format::Csv => {
                    println!("item,message");
                    for d in &v.discrepancies {
                        println!("{},{}", d.item, d.message);
                    }
                }
            }
            if v.passed() {
                Ok(0)
            } else {
                Err(CliError::Verification(format!("{} discrepancies", v.discrepancies.len())))
            }
        }
        Command::Presets { action: PresetAction::List } => {
            match cli.format {
                Format::Json => {
                    let list: Vec<_> = presets::PRESETS
                        .iter()
                        .map(|p| serde_json::json!({"name": p.name, "description": p.description()}))
                        .collect();
                    println!("{}", to_json(&list)?);
                }
                Format::Csv => {
                    let mut wr = csv::Writer::from_writer(std::io::stdout());
                    wr.write_record(["name", "description"]).map_err(|e| CliError::Runtime(e.to_string()))?;
                    for p in &presets::PRESETS {
                        wr.write_record([p.name, &p.description()]).map_err(|e| CliError::Runtime(e.to_string()))?;
                    }
                    wr.flush().map_err(|e| CliError::io("stdout", e))?;
                }
            }
            Ok(0)
        }
        Command::Presets { action: PresetAction::Emit { name } } => {
            let p = presets::find(name).ok_or_else(|| {
                let names: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
                CliError::Validation(vec![Finding::error("", format!("unknown preset {name}; available: {}", names.join(", ")))])
            })?;
            print!("{}", p.json);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let CliError::Validation(findings) = &e {
                for f in findings {
                    eprintln!("{f}");
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
