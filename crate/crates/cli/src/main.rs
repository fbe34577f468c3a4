//! `fsbound`: converse bounds, rate-distortion and capacity computations and
//! finite-state machine simulation from the command line.
//!
//! Exit codes: 0 success, 1 vacuous or infeasible result (the output is
//! still written and flagged), 2 usage or I/O error (nothing is written).

mod commands;
mod config;
mod inputs;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::*;
use output::{Echo, Outcome};

#[derive(Parser)]
#[command(name = "fsbound", version, about = "Distortion bounds for finite-state source-channel codes")]
struct Cli {
    /// JSON or TOML file whose keys override the command-line options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound on the expected distortion.
    BoundExpected(BoundExpectedArgs),
    /// Lower bound on the probability of excess distortion over a Δ grid.
    BoundExcess(BoundExcessArgs),
    /// Monte-Carlo simulation of finite-state machines against the bound.
    Simulate(SimulateArgs),
    /// LZ78 and conditional LZ complexity, optionally with the two-sided bound.
    Lz(LzArgs),
    /// Rate-distortion or distortion-rate function.
    Rdf(RdfArgs),
    /// Wyner-Ziv rate-distortion or distortion-rate function.
    WzRdf(WzRdfArgs),
    /// Channel capacity, optionally cost-constrained, and sphere-packing exponent.
    Capacity(CapacityArgs),
    /// Capacity with causal state information at the encoder.
    CausalCapacity(CausalCapacityArgs),
    /// CSV sweep of one quantity over a parameter grid.
    Sweep(SweepArgs),
}

fn dispatch<T: Serialize + DeserializeOwned>(
    name: &str,
    args: T,
    config: Option<&Path>,
    run: fn(T, &Echo) -> Result<Outcome>,
) -> Result<Outcome> {
    let (args, echo_cfg) = config::resolve(args, config)?;
    let echo = Echo {
        command: name,
        config: &echo_cfg,
    };
    match run(args, &echo) {
        Err(e) if e.downcast_ref::<fsbound::Error>().is_some_and(|e| e.is_infeasible()) => {
            echo.infeasible(&format!("{e:#}"))
        }
        other => other,
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::BoundExpected(a) => dispatch("bound-expected", a, cfg, bound_expected),
        Command::BoundExcess(a) => dispatch("bound-excess", a, cfg, bound_excess),
        Command::Simulate(a) => dispatch("simulate", a, cfg, simulate),
        Command::Lz(a) => dispatch("lz", a, cfg, lz),
        Command::Rdf(a) => dispatch("rdf", a, cfg, rdf),
        Command::WzRdf(a) => dispatch("wz-rdf", a, cfg, wz_rdf),
        Command::Capacity(a) => dispatch("capacity", a, cfg, capacity),
        Command::CausalCapacity(a) => dispatch("causal-capacity", a, cfg, causal_capacity),
        Command::Sweep(a) => dispatch("sweep", a, cfg, sweep),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.output.clone();
    let outcome = run(cli).and_then(|o| {
        output::emit(&o.text, out.as_deref())?;
        Ok(o)
    });
    match outcome {
        Ok(o) => ExitCode::from(o.status.code()),
        Err(e) => {
            eprintln!("fsbound: {e:#}");
            ExitCode::from(2)
        }
    }
}
