//! The issuance/borrowing loop.
//!
//! Each step runs in a fixed order:
//!
//! 1. scheduled shocks are applied (with forced liquidation), then the
//!    company offers the scheduled shares at the prevailing price;
//! 2. investors take their pro-rata allotment, paying from cash first and
//!    borrowing the shortfall against their stock, within both their
//!    collateral headroom and the lender's exposure limit;
//! 3. whatever the investors could pay for is issued;
//! 4. the proceeds buy tokens at the prevailing token price (which then
//!    responds to the purchase under the impact model);
//! 5. the share price is set by the mNAV model;
//! 6. every loan is re-checked against its collateral;
//! 7. KPIs are recorded.

use std::fmt;

use serde::Serialize;

use super::config::{IssuanceKind, MnavModel, PriceImpact, ScenarioConfig, Shock};
use super::state::{issue_and_buy, kpis, CompanyState, CreditProvider, InvestorState, Kpis};
use super::stress::{stress_in_place, DEFAULT_MAX_ROUNDS};
use super::FlywheelError;

/// Company, shareholders and their lender.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct World {
    pub company: CompanyState,
    pub investors: Vec<InvestorState>,
    pub credit: CreditProvider,
    /// mNAV the share price is anchored to under the constant and path models.
    pub mnav_level: f64,
    /// Cumulative haircut raises from shocks, added to the scheduled haircut.
    pub haircut_add_on: f64,
}

impl World {
    /// Builds a world whose lender exposure is the investors' total debt.
    pub fn new(
        company: CompanyState,
        investors: Vec<InvestorState>,
        haircut: f64,
        exposure_limit: f64,
    ) -> Result<Self, FlywheelError> {
        company.validate()?;
        let mnav_level = company.mnav()?;
        let exposure = investors.iter().map(|i| i.debt).sum();
        Ok(Self {
            company,
            investors,
            credit: CreditProvider {
                haircut,
                exposure,
                exposure_limit,
            },
            mnav_level,
            haircut_add_on: 0.0,
        })
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self, FlywheelError> {
        Self::new(
            config.company,
            config.investors.clone(),
            config.haircut_at(0),
            config.exposure_limit,
        )
    }

    pub fn total_debt(&self) -> f64 {
        self.investors.iter().map(|i| i.debt).sum()
    }

    fn effective_haircut(&self, scheduled: f64) -> f64 {
        (scheduled + self.haircut_add_on).min(1.0)
    }
}

/// What happened during a step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Events {
    pub loan_granted: bool,
    pub loan_refused: bool,
    pub margin_call: bool,
    pub liquidation: bool,
    /// Scheduled issuance could not be fully absorbed.
    pub infeasible_schedule: bool,
    pub shock: bool,
    /// A liquidation did not reach its fixed point.
    pub non_convergence: bool,
}

impl Events {
    fn names(&self) -> impl Iterator<Item = &'static str> {
        [
            (self.shock, "shock"),
            (self.loan_granted, "loan_granted"),
            (self.loan_refused, "loan_refused"),
            (self.infeasible_schedule, "infeasible_schedule"),
            (self.margin_call, "margin_call"),
            (self.liquidation, "liquidation"),
            (self.non_convergence, "non_convergence"),
        ]
        .into_iter()
        .filter_map(|(set, name)| set.then_some(name))
    }
}

impl fmt::Display for Events {
    /// Pipe-separated event names, or `none`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for name in self.names() {
            if any {
                f.write_str("|")?;
            }
            f.write_str(name)?;
            any = true;
        }
        if !any {
            f.write_str("none")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub company: CompanyState,
    pub mnav: f64,
    pub kpis: Kpis,
    pub investors: Vec<InvestorState>,
    pub investor_debt: f64,
    pub credit_exposure: f64,
    pub haircut: f64,
    pub scheduled_shares: f64,
    pub issued_shares: f64,
    /// Cash raised by the company this step.
    pub proceeds: f64,
    pub tokens_bought: f64,
    /// Token price the proceeds were converted at.
    pub purchase_token_price: f64,
    pub events: Events,
}

/// Executes step `step_index` of `config` on `world`.
pub fn step(world: &mut World, config: &ScenarioConfig, step_index: usize) -> StepRecord {
    let before = world.company;
    let impact = config.mnav.impact();
    let mut events = Events::default();

    world.credit.haircut = world.effective_haircut(config.haircut_at(step_index));
    for shock in config.shocks_at(step_index) {
        events.shock = true;
        apply_shock(world, shock, impact, &mut events);
    }
    let haircut = world.credit.haircut;

    let price = world.company.share_price;
    let scheduled_shares = match config.issuance.kind {
        IssuanceKind::Shares => config.issuance_at(step_index),
        IssuanceKind::Proceeds => config.issuance_at(step_index) / price,
    };
    let (issued_shares, proceeds) = if scheduled_shares > 0.0 {
        absorb(world, scheduled_shares, haircut, &mut events)
    } else {
        (0.0, 0.0)
    };

    let purchase_token_price = world.company.token_price;
    let tokens_bought = proceeds / purchase_token_price;
    if issued_shares > 0.0 {
        let shares_before = world.company.shares_outstanding;
        match (&config.mnav, impact) {
            (MnavModel::Constant, _) => {
                // the allotment is positive, so the issue is well formed
                world.company = issue_and_buy(&world.company, issued_shares)
                    .expect("positive issuance on a valid company");
            }
            (_, impact) => {
                let c = &mut world.company;
                c.shares_outstanding += issued_shares;
                c.tokens_held += tokens_bought;
                if let Some(impact) = impact {
                    c.token_price *= impact.token_factor(tokens_bought);
                    c.share_price *= impact.share_factor(issued_shares / shares_before);
                }
            }
        }
    }
    if let Some(level) = config.mnav_path_at(step_index) {
        world.mnav_level = level;
        let c = &mut world.company;
        c.share_price = level * c.nav() / c.shares_outstanding;
    } else if let Ok(m) = world.company.mnav() {
        world.mnav_level = m;
    }

    let share_price = world.company.share_price;
    if world
        .investors
        .iter()
        .any(|i| i.is_undercollateralised(haircut, share_price))
    {
        events.margin_call = true;
    }

    let kpis = kpis(&before, &world.company).unwrap_or_default();
    StepRecord {
        step: step_index,
        company: world.company,
        mnav: world.company.mnav().unwrap_or(f64::NAN),
        kpis,
        investors: world.investors.clone(),
        investor_debt: world.total_debt(),
        credit_exposure: world.credit.exposure,
        haircut,
        scheduled_shares,
        issued_shares,
        proceeds,
        tokens_bought,
        purchase_token_price,
        events,
    }
}

fn apply_shock(world: &mut World, shock: Shock, impact: Option<&PriceImpact>, events: &mut Events) {
    let outcome = stress_in_place(world, shock, impact, DEFAULT_MAX_ROUNDS);
    let report = match &outcome {
        Ok(report) => report,
        Err(FlywheelError::NonConvergence { report, .. }) => {
            events.non_convergence = true;
            report.as_ref()
        }
        // shocks are validated with the config
        Err(_) => return,
    };
    events.margin_call |= report.margin_calls > 0;
    events.liquidation |= report.shares_liquidated > 0.0;
}

/// Sells up to `scheduled` new shares to the investors at the current price.
///
/// Returns `(shares issued, cash raised)`.
fn absorb(world: &mut World, scheduled: f64, haircut: f64, events: &mut Events) -> (f64, f64) {
    let price = world.company.share_price;
    let tiny = 1e-12 * scheduled * price;
    let mut remaining = scheduled;
    let mut issued = 0.0;
    let mut proceeds = 0.0;

    // Investors who run out of means drop out and the rest are re-allotted;
    // one pass per investor is always enough.
    for _ in 0..=world.investors.len() {
        let room = world.credit.room();
        let able: Vec<usize> = (0..world.investors.len())
            .filter(|&i| {
                let inv = &world.investors[i];
                inv.cash + inv.headroom(haircut, price).min(room) > tiny
            })
            .collect();
        if able.is_empty() || remaining <= 1e-12 * scheduled {
            break;
        }
        let held: f64 = able.iter().map(|&i| world.investors[i].shares_held).sum();
        let round_total = remaining;
        let mut bought = 0.0;
        for &i in &able {
            let weight = if held > 0.0 {
                world.investors[i].shares_held / held
            } else {
                1.0 / able.len() as f64
            };
            let cost = round_total * weight * price;
            let credit_room = world.credit.room();
            let inv = &mut world.investors[i];
            let from_cash = inv.cash.min(cost);
            let shortfall = cost - from_cash;
            let loan = shortfall.min(inv.headroom(haircut, price)).min(credit_room);
            if loan > 0.0 {
                events.loan_granted = true;
            }
            if shortfall - loan > tiny {
                events.loan_refused = true;
            }
            let spent = from_cash + loan;
            let shares = spent / price;
            inv.cash -= from_cash;
            inv.debt += loan;
            inv.shares_held += shares;
            world.credit.exposure += loan;
            bought += shares;
            proceeds += spent;
        }
        issued += bought;
        remaining = (remaining - bought).max(0.0);
    }
    if remaining > 1e-9 * scheduled {
        events.infeasible_schedule = true;
    }
    (issued, proceeds)
}

/// Runs the full horizon.
pub fn run(config: &ScenarioConfig) -> Result<Vec<StepRecord>, FlywheelError> {
    run_to_end(config).map(|(records, _)| records)
}

/// Runs the full horizon and also returns the final world.
pub fn run_to_end(config: &ScenarioConfig) -> Result<(Vec<StepRecord>, World), FlywheelError> {
    config.validate()?;
    let mut world = World::from_config(config)?;
    let records = (0..config.steps)
        .map(|k| step(&mut world, config, k))
        .collect();
    Ok((records, world))
}
