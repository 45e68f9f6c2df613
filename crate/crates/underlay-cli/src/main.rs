//! Experiment runner: each subcommand reproduces one standard scenario as a
//! parameter sweep and writes a plot-ready CSV.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

mod config;
mod scenarios;

use clap::{Args, Parser, Subcommand};
use config::{load, validate, ExperimentConfig};
use scenarios::{run_scenario, RunError, Scenario};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "underlay",
    about = "Outage and design sweeps for underlay spectrum sharing with a full-duplex primary pair",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment config (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<String>,
    /// Output CSV path (overrides the config; stdout when neither is set)
    #[arg(long)]
    out: Option<String>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample-count override
    #[arg(long)]
    samples: Option<u64>,
    /// Skip sampling; emit analytic columns only
    #[arg(long)]
    no_mc: bool,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Exact primary outage vs its design bound at fixed signal parameters
    BoundCheck(RunArgs),
    /// Proper vs improper average-CSI designs over the secondary link quality
    AcsiSweep(RunArgs),
    /// Proper vs improper designs over the secondary target rate
    RateSweep(RunArgs),
    /// Proper vs improper designs over the residual self-interference level
    RsiSweep(RunArgs),
    /// Average-CSI design vs the time average of the direct-link gated design
    IdlCompare(RunArgs),
    /// Power-saving probability of the gated design
    PowerSaving(RunArgs),
    /// Average energy efficiency of both designs
    EnergyEfficiency(RunArgs),
    /// Primary-side protection from direct-link gating
    PuProtection(RunArgs),
    /// Check a config and list diagnostics without running anything
    Validate {
        /// Experiment config (TOML); built-in defaults when omitted
        #[arg(long)]
        config: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (scenario, args) = match cli.command {
        Command::BoundCheck(a) => (Scenario::BoundCheck, a),
        Command::AcsiSweep(a) => (Scenario::AcsiSweep, a),
        Command::RateSweep(a) => (Scenario::RateSweep, a),
        Command::RsiSweep(a) => (Scenario::RsiSweep, a),
        Command::IdlCompare(a) => (Scenario::IdlCompare, a),
        Command::PowerSaving(a) => (Scenario::PowerSaving, a),
        Command::EnergyEfficiency(a) => (Scenario::EnergyEfficiency, a),
        Command::PuProtection(a) => (Scenario::PuProtection, a),
        Command::Validate { config } => return run_validate(config),
    };
    run(scenario, args)
}

/// Optional cap on worker parallelism via UNDERLAY_THREADS.
fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("UNDERLAY_THREADS") {
        match v.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("ignoring invalid UNDERLAY_THREADS value '{v}'"),
        }
    }
}

fn load_or_default(path: &Option<String>) -> Result<ExperimentConfig, ExitCode> {
    match path {
        Some(p) => load(p).map_err(|d| {
            eprintln!("{d}");
            ExitCode::from(1)
        }),
        None => Ok(ExperimentConfig::default()),
    }
}

fn run_validate(path: Option<String>) -> ExitCode {
    let cfg = match load_or_default(&path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let diags = validate(&cfg, &Scenario::names());
    if diags.is_empty() {
        println!("ok");
        ExitCode::SUCCESS
    } else {
        for d in &diags {
            println!("{d}");
        }
        ExitCode::from(1)
    }
}

fn run(scenario: Scenario, args: RunArgs) -> ExitCode {
    let mut cfg = match load_or_default(&args.config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(seed) = args.seed {
        cfg.montecarlo.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.montecarlo.samples = samples;
    }
    if args.no_mc {
        cfg.montecarlo.enabled = false;
    }

    let diags = validate(&cfg, &Scenario::names());
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("{d}");
        }
        return ExitCode::from(1);
    }
    if let Some(name) = &cfg.scenario {
        if name != scenario.name() {
            eprintln!(
                "scenario: config names '{name}' but the '{}' subcommand was invoked",
                scenario.name()
            );
            return ExitCode::from(1);
        }
    }

    let table = match run_scenario(scenario, &cfg) {
        Ok(t) => t,
        Err(RunError::Numerics(msg)) => {
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(2);
        }
    };

    let csv = table.to_csv();
    let dest = args.out.or(cfg.output.path);
    match dest {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                eprintln!("{path}: cannot write output: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            if std::io::stdout().write_all(csv.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
