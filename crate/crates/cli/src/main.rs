//! `tkelly`: growth-optimal sizing, divergence-ball robust fractions and the
//! treasury flywheel simulator from the command line.
//!
//! Exit status is 0 on success, 1 when the inputs are outside a model's
//! domain, and 2 for usage errors and unreadable or invalid configs.

mod flywheel;
mod format;
mod kelly;
mod robust;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treasury_kelly::{DivergenceSpec, Unit};

#[derive(Parser)]
#[command(
    name = "tkelly",
    version,
    about = "Robust Kelly sizing and treasury flywheel simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth rate of a double-or-nothing bet.
    #[command(subcommand)]
    Kelly(KellyCommand),
    /// Uncertainty sets and robust betting fractions.
    #[command(subcommand)]
    Fraction(FractionCommand),
    /// Treasury company issuance and credit simulation.
    #[command(subcommand)]
    Flywheel(FlywheelCommand),
}

#[derive(Subcommand)]
pub enum KellyCommand {
    /// Growth rate at fraction `f`.
    Growth {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        f: f64,
        #[arg(long, value_enum, default_value_t = UnitArg::Nats)]
        unit: UnitArg,
    },
    /// Log-optimal fraction `2p - 1`.
    Optimal {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
    },
    /// Exact growth against its truncated expansion around the optimum.
    Expand {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 3)]
        order: u32,
        #[arg(long, value_enum, default_value_t = UnitArg::Nats)]
        unit: UnitArg,
    },
}

#[derive(Subcommand)]
pub enum FractionCommand {
    /// Endpoints of the uncertainty set around `q`.
    Solve(SetArgs),
    /// Worst-case, equal-weighted, best-case and heuristic fractions.
    Robust {
        #[command(flatten)]
        set: SetArgs,
        /// Risk aversion of the heuristic rule.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Compares the two cubic terms of the KL expansion with the exact value.
    Series {
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
    },
}

#[derive(Args)]
pub struct SetArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = DivergenceArg::Kl)]
    pub divergence: DivergenceArg,
}

#[derive(Subcommand)]
pub enum FlywheelCommand {
    /// Simulates each config and writes the per-step CSV.
    Run(BatchArgs),
    /// Runs each config to its final state and applies its `[[stress]]` shocks.
    Stress(BatchArgs),
    /// The one-share issue from a 4-share, 1-token company at mNAV 4.
    Example,
}

#[derive(Args)]
pub struct BatchArgs {
    /// Scenario file (TOML); repeat for a batch.
    #[arg(long, required = true)]
    pub config: Vec<PathBuf>,
    /// Output file for a single config (default: stdout).
    #[arg(long, conflicts_with = "out_dir")]
    pub out: Option<PathBuf>,
    /// Directory receiving one CSV per config.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for a batch.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum UnitArg {
    Nats,
    Bits,
}

impl From<UnitArg> for Unit {
    fn from(unit: UnitArg) -> Self {
        match unit {
            UnitArg::Nats => Unit::Nats,
            UnitArg::Bits => Unit::Bits,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DivergenceArg {
    Kl,
    Is,
    Se,
}

impl From<DivergenceArg> for DivergenceSpec {
    fn from(d: DivergenceArg) -> Self {
        match d {
            DivergenceArg::Kl => DivergenceSpec::Kl,
            DivergenceArg::Is => DivergenceSpec::ItakuraSaito,
            DivergenceArg::Se => DivergenceSpec::SquaredEuclidean,
        }
    }
}

/// A failed command and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(m) | Failure::Usage(m) => f.write_str(m),
        }
    }
}

impl From<treasury_kelly::Error> for Failure {
    fn from(e: treasury_kelly::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kelly(cmd) => kelly::run(cmd),
        Command::Fraction(cmd) => robust::run(cmd),
        Command::Flywheel(cmd) => flywheel::run(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
