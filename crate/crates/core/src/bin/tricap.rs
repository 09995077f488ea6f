use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tricap::config::{parse_config, CONFIG_HELP};
use tricap::measure::{measure, Quantity};
use tricap::output::read_snapshot;
use tricap::runner::{run, Overrides, RunFailure};
use tricap::Error;

#[derive(Parser)]
#[command(name = "tricap", version, about = "Ternary phase-field flow and neo-Hookean solid simulator", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write energy.csv, VTK snapshots and a manifest.
    #[command(after_help = CONFIG_HELP)]
    Run {
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of steps (overrides end_time).
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Measure a quantity on a fluid snapshot.
    Measure {
        snapshot: PathBuf,
        #[arg(long)]
        quantity: Quantity,
    },
    /// Parse and validate a config without running it.
    #[command(after_help = CONFIG_HELP)]
    Check { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<tricap::config::ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn fail(code: &str, message: impl std::fmt::Display) -> ExitCode {
    let line = message.to_string().replace(['\n', '\r'], " ");
    eprintln!("error[{code}]: {line}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let text: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            return fail("Usage", text.join(" ").trim_start_matches("error: "));
        }
    };
    match cli.command {
        Command::Run { config, out, seed, steps } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e.code(), e),
            };
            Overrides { out_dir: out, seed, steps }.apply(&mut cfg);
            match run(&cfg) {
                Ok(s) => {
                    println!(
                        "ok scenario={} steps={} t={:e} out={}",
                        s.scenario,
                        s.steps,
                        s.final_time,
                        s.out_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(f @ RunFailure { .. }) => fail(f.error.code(), &f),
            }
        }
        Command::Measure { snapshot, quantity } => {
            let result = read_snapshot(&snapshot).and_then(|s| measure(&s, quantity));
            match result {
                Ok(values) => {
                    for (k, v) in values {
                        println!("{k} = {v:.10e}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e.code(), e),
            }
        }
        Command::Check { config } => match load(&config).and_then(|c| c.validate().map(|_| c)) {
            Ok(c) => {
                println!("ok scenario={}", c.scenario);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e.code(), e),
        },
    }
}
