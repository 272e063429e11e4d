use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use nsf_pen::driver::{cmd_run, cmd_sweep};
use nsf_pen::io::config::parse_config;

#[derive(Parser)]
#[command(name = "nsf-pen", version, about = "Penalized compressible Navier-Stokes-Fourier solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration, writing VTK dumps and diagnostics.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an (N, epsilon) sweep, writing errors.csv and eoc.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in invariant self-test.
    Check,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { config } => {
            let cfg = parse_config(&config)?;
            let report = cmd_run(&cfg)?;
            println!(
                "{}: {} steps to t = {}, {} dumps in {}",
                cfg.experiment,
                report.output.steps,
                report.output.time,
                report.dumps.len(),
                report.dir.display()
            );
            Ok(true)
        }
        Command::Sweep { config } => {
            let cfg = parse_config(&config)?;
            let report = cmd_sweep(&cfg)?;
            let failed = report.runs.values().filter(|r| r.is_err()).count();
            println!(
                "{} runs ({} failed); tables in {}",
                report.runs.len(),
                failed,
                report.dir.display()
            );
            Ok(true)
        }
        Command::Check => {
            let results = nsf_pen::check::run_checks();
            let mut ok = true;
            for r in &results {
                println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                ok &= r.passed;
            }
            Ok(ok)
        }
    }
}
