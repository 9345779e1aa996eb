use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pm_elect::harness::experiment::{self, ExperimentSpec, RunRecord};
use pm_elect::harness::generators::parse_params;
use pm_elect::lattice::Configuration;
use pm_elect::topology::{dark_blue_edges, grey_components};

#[derive(Parser)]
#[command(name = "pm-elect", version, about = "Leader election on a triangular lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration file and print a short summary.
    Validate { file: PathBuf },
    /// Run one configuration to quiescence and write its artifacts.
    Run {
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        config: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        /// Family parameters as k=v, repeatable or comma separated.
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
        #[arg(long, default_value = "sync")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// svg or ascii
        #[arg(long)]
        render: Option<String>,
        #[arg(long)]
        stability_window: Option<u64>,
    },
    /// Run every entry of a sweep file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn report(label: &str, records: &[RunRecord]) -> bool {
    let mut ok = true;
    for r in records {
        let status = if r.passed() { "ok" } else { "FAILED" };
        println!(
            "{label} n={} mode={} seed={}: {status} ticks={} activation_units={} merges={} comparisons={}",
            r.row.n, r.row.mode, r.row.seed, r.row.ticks, r.row.activation_units, r.row.merges, r.row.comparisons
        );
        for p in &r.problems {
            println!("  {p}");
        }
        ok &= r.passed();
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match Configuration::from_json(&text) {
                Ok(config) => {
                    println!(
                        "valid: {} particles, {} grey components, {} dark-blue edges",
                        config.len(),
                        grey_components(&config).len(),
                        dark_blue_edges(&config).len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("invalid: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Run { config, family, params, mode, seed, out, render, stability_window } => {
            let params = match parse_params(params.iter().map(String::as_str)) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let spec = ExperimentSpec {
                family,
                params,
                config,
                mode,
                seeds: vec![seed],
                stability_window,
                tick_budget: None,
                out,
                render,
            };
            match experiment::run(&spec) {
                Ok(records) if report("run", &records) => ExitCode::SUCCESS,
                Ok(_) => ExitCode::FAILURE,
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Sweep { spec, threads } => {
            let sweep = match experiment::load_sweep(&spec) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let mut ok = true;
            for (i, result) in experiment::sweep(&sweep, threads).into_iter().enumerate() {
                match result {
                    Ok(records) => ok &= report(&format!("entry {i}"), &records),
                    Err(e) => {
                        eprintln!("entry {i}: {e}");
                        ok = false;
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
