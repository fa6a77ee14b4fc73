use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use si2e_harness::config::{parse_methods, parse_seeds};
use si2e_harness::verify::{self, Fault, Group};
use si2e_harness::{experiment, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "si2e", version, about = "Structural-entropy exploration experiments and property checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every configured method on every seed and write results.
    Run {
        /// Experiment file of `key = value` lines.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated methods: none, shannon-entropy, si2e.
        #[arg(long)]
        method: Option<String>,
        /// Inclusive range `0..9` or a comma list.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override any config key, e.g. `--set total_steps=5000`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the property suite and print a pass/fail table.
    Verify {
        /// Run a single group.
        #[arg(long)]
        only: Option<Group>,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn build_config(
    config: PathBuf,
    method: Option<String>,
    seeds: Option<String>,
    out: Option<PathBuf>,
    overrides: Vec<String>,
    jobs: Option<usize>,
) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::from_file(&config)?;
    for o in &overrides {
        c.apply_override(o)?;
    }
    if let Some(m) = method {
        c.methods = parse_methods(&m)?;
    }
    if let Some(s) = seeds {
        c.seeds = parse_seeds(&s)?;
    }
    if let Some(o) = out {
        c.out = o;
    }
    if jobs.is_some() {
        c.jobs = jobs;
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, method, seeds, out, overrides, jobs } => {
            let result = build_config(config, method, seeds, out, overrides, jobs).and_then(|c| {
                let summary = experiment::run(&c)?;
                print!("{}", experiment::render(&summary));
                println!("results written to {}", c.out.display());
                Ok(())
            });
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Verify { only, inject_fault } => {
            let results = verify::run(only, inject_fault);
            print!("{}", verify::render_table(&results));
            if results.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
