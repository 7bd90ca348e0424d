//! Batch front-end: `semiflow run <scenario.json>`.
//!
//! Exit codes: 0 on success, 1 on input or runtime errors, 2 when a
//! cross-validation disagreement was recorded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use semiflow::scenario::{self, OutputFormat, RunOverrides, Scenario};

#[derive(Parser)]
#[command(name = "semiflow", version, about = "Half-plane semigroup laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its report bundle.
    Run {
        /// Scenario JSON file.
        file: PathBuf,
        /// Output directory; reports land under <out>/<scenario-name>/.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Default relative tolerance for limit detection when the scenario
        /// file does not set its own tolerances.
        #[arg(long)]
        tol: Option<f64>,
        /// Default horizon t_max when the scenario file does not set one.
        #[arg(long)]
        horizon: Option<f64>,
        /// Series output format.
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            out,
            tol,
            horizon,
            format,
        } => match run(&file, &out, tol, horizon, &format) {
            Ok(consistent) => {
                if consistent {
                    ExitCode::SUCCESS
                } else {
                    eprintln!("cross-validation disagreement; see validation.json");
                    ExitCode::from(2)
                }
            }
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn run(
    file: &Path,
    out: &Path,
    tol: Option<f64>,
    horizon: Option<f64>,
    format: &str,
) -> anyhow::Result<bool> {
    let format = OutputFormat::parse(format)?;
    let scenario =
        Scenario::from_path(file).with_context(|| format!("loading {}", file.display()))?;
    let overrides = RunOverrides {
        horizon,
        limit_rel: tol,
    };
    let report = scenario::run(&scenario, out, format, &overrides)
        .with_context(|| format!("running scenario {}", scenario.name))?;
    println!(
        "{}: {} output file(s) under {}",
        report.name,
        report.outputs.len(),
        report.out_dir.display()
    );
    for file in &report.outputs {
        println!("  {file}");
    }
    Ok(report.consistent)
}
