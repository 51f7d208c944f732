//! Treasury-company flywheel: equity issued above NAV buys tokens, and
//! shareholders borrow against the richer stock to buy the next issue.

mod config;
mod output;
mod sim;
mod state;
mod stress;

use thiserror::Error;

pub use config::{
    ImpactForm, Issuance, IssuanceKind, MnavModel, PriceImpact, ScenarioConfig, Shock, ShockEvent,
    ShockKind, MIN_PRICE_FACTOR,
};
pub use output::{series_to_string, write_series, write_stress, SERIES_COLUMNS, STRESS_COLUMNS};
pub use sim::{run, run_to_end, step, Events, StepRecord, World};
pub use state::{
    issue_and_buy, kpis, mnav, CompanyState, CreditProvider, InvestorState, Kpis, COLLATERAL_SLACK,
};
pub use stress::{stress, stress_with_rounds, InvestorOutcome, StressReport, DEFAULT_MAX_ROUNDS};

#[derive(Debug, Error)]
pub enum FlywheelError {
    #[error("token NAV is zero, mNAV is undefined")]
    ZeroNav,
    #[error("tokens per share is zero, yield is undefined")]
    ZeroBtcPerShare,
    #[error("invalid company state: {0}")]
    InvalidState(&'static str),
    #[error("share issuance must be positive, got {0}")]
    NonPositiveIssuance(f64),
    #[error("shock {kind} has illegal magnitude {magnitude}")]
    InvalidShock { kind: &'static str, magnitude: f64 },
    #[error("{0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("liquidation did not settle within {rounds} rounds")]
    NonConvergence {
        rounds: usize,
        report: Box<StressReport>,
    },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
