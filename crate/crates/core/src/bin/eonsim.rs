use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use eonsim::config::load_config;
use eonsim::emit::{emit, format_sig6};
use eonsim::sweep::{run_sweep_with, Execution, SweepResult};

#[derive(Parser, Debug)]
#[command(
    name = "eonsim",
    version,
    about = "Elastic optical network simulator with jamming-aware admission"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the jamming-power sweep described by a scenario file.
    Simulate {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Output directory for CSV files and the manifest.
        #[arg(long)]
        out: PathBuf,
        /// Replace the scenario's seeds with 1..=N.
        #[arg(long, value_name = "N")]
        seeds: Option<u64>,
        /// Worker threads; 1 runs sequentially.
        #[arg(long, value_name = "K")]
        parallel: Option<usize>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seeds,
            parallel,
        } => {
            let mut scenario =
                load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(n) = seeds {
                anyhow::ensure!(n >= 1, "--seeds must be at least 1");
                scenario.seeds = (1..=n).collect();
            }
            let result = sweep(&scenario, parallel)?;
            let files = emit(&result, &out)?;
            print_summary(&result);
            eprintln!("wrote {} files to {}", files.len(), out.display());
            Ok(())
        }
    }
}

fn sweep(scenario: &eonsim::config::ScenarioConfig, parallel: Option<usize>) -> Result<SweepResult> {
    match parallel {
        Some(0) => anyhow::bail!("--parallel must be at least 1"),
        Some(1) => Ok(run_sweep_with(scenario, Execution::Sequential)?),
        #[cfg(feature = "parallel")]
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build()?;
            Ok(pool.install(|| run_sweep_with(scenario, Execution::Parallel))?)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            eprintln!("warning: built without the `parallel` feature; running sequentially");
            Ok(run_sweep_with(scenario, Execution::Sequential)?)
        }
        None => Ok(run_sweep_with(scenario, Execution::default())?),
    }
}

fn print_summary(result: &SweepResult) {
    println!("{:>10}  {:>12}  {:>12}", "eps_db", "blocking", "std");
    for p in &result.points {
        println!(
            "{:>10}  {:>12}  {:>12}",
            format_sig6(p.epsilon_db),
            format_sig6(p.aggregate.blocking_mean),
            format_sig6(p.aggregate.blocking_std)
        );
    }
}
