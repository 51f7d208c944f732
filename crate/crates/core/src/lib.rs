//! Robust Kelly sizing under probability uncertainty, and a deterministic
//! simulator of the crypto-treasury issuance/borrowing flywheel.
//!
//! * [`kelly`]: log-growth of the double-or-nothing bet and its expansion
//!   around the optimum.
//! * [`divergence`]: Bernoulli KL, Bregman divergences, and uncertainty sets.
//! * [`robust`]: worst/best/equal-weighted and discounted Kelly fractions.
//! * [`flywheel`]: mNAV accretion, shareholder leverage, stress liquidation.

pub mod divergence;
pub mod error;
pub mod flywheel;
pub mod kelly;
pub mod robust;

pub use divergence::{
    bregman, kl_bernoulli, kl_series, series_diagnostic, solve_uncertainty_set, CustomGenerator,
    DivergenceSpec, SeriesDiagnostic, SeriesVariant, UncertaintySet,
};
pub use error::{Error, Result, Side};
pub use flywheel::{
    issue_and_buy, kpis, mnav, run, step, stress, CompanyState, CreditProvider, FlywheelError,
    InvestorState, Kpis, ScenarioConfig, Shock, StepRecord, StressReport, World,
};
pub use kelly::{
    growth_expansion, growth_rate, optimal_fraction, optimal_growth, BinaryGame, Fraction,
    GrowthRate, Unit,
};
pub use robust::{
    best_case_fraction, equal_weighted_fraction, heuristic_fraction, mixture_argmax, robust_report,
    worst_case_fraction, RobustFraction, RobustPolicy, RobustReport,
};
