use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use waveguide_dce::experiments::{self, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "dce", version, about = "Parametrically modulated qubit arrays in a waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment configuration and write CSV plus a .meta sidecar.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV path; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the experiment names, their probe axes and output columns.
    ListExperiments,
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, threads } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let parsed = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(diags) => {
                    for d in diags {
                        eprintln!("{d}");
                    }
                    return ExitCode::from(1);
                }
            };
            match experiments::run(&parsed, out.as_deref(), threads) {
                Ok(report) => {
                    println!("{} rows -> {} ({})", report.rows, report.csv.display(), report.meta.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let diags = experiments::validate_text(&text);
            if diags.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for d in diags {
                    println!("{d}");
                }
                ExitCode::from(1)
            }
        }
        Command::ListExperiments => {
            for e in Experiment::ALL {
                let probes: Vec<_> = e.probes().iter().map(|p| p.name()).collect();
                let probes = if probes.is_empty() { "-".to_string() } else { probes.join(",") };
                println!("{:<28} probes: {:<16} columns: {}", e.name(), probes, e.columns().join(","));
                println!("    {}", e.summary());
            }
            ExitCode::SUCCESS
        }
    }
}
