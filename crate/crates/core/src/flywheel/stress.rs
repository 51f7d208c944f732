//! Shocks and forced liquidation.
//!
//! After a shock every loan is re-checked. An investor whose debt exceeds
//! `(1 - h)` of their stock sells just enough shares at the current price to
//! get back within the limit; selling `x` shares at price `P` restores the
//! constraint when
//!
//! ```text
//! x >= (debt - (1 - h) shares P) / (h P)
//! ```
//!
//! With `h = 0` no partial sale helps and the whole position goes. If the
//! holdings run out first, the unpaid debt is written off as a lender loss.
//! Under the impact model the round's forced sales push the share price
//! down, which can put more investors underwater; rounds repeat until no loan
//! is in breach.

use serde::Serialize;

use super::config::{PriceImpact, Shock, ShockKind};
use super::sim::World;
use super::FlywheelError;

pub const DEFAULT_MAX_ROUNDS: usize = 100;

/// What one investor went through during a stress.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct InvestorOutcome {
    pub shares_before: f64,
    pub shares_sold: f64,
    pub debt_before: f64,
    /// Sale proceeds applied to the loan.
    pub recovered: f64,
    /// Debt still outstanding, now within the collateral limit.
    pub residual_debt: f64,
    /// Debt written off after the holdings ran out.
    pub loss: f64,
    pub margin_called: bool,
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressReport {
    pub shock: Shock,
    /// Liquidation rounds executed.
    pub rounds: usize,
    pub converged: bool,
    /// Investors margin-called at least once.
    pub margin_calls: usize,
    pub shares_liquidated: f64,
    pub recovered: f64,
    pub credit_loss: f64,
    pub exposure_before: f64,
    pub exposure_after: f64,
    pub share_price_before: f64,
    pub share_price_after: f64,
    pub token_price_after: f64,
    pub haircut_after: f64,
    pub investors: Vec<InvestorOutcome>,
    /// State once the liquidation stopped.
    pub world: World,
}

/// Applies `shock` to a copy of `world` and liquidates to a fixed point.
///
/// `impact`, when given, is the price response to forced share sales.
pub fn stress(
    world: &World,
    shock: Shock,
    impact: Option<&PriceImpact>,
) -> Result<StressReport, FlywheelError> {
    stress_with_rounds(world, shock, impact, DEFAULT_MAX_ROUNDS)
}

pub fn stress_with_rounds(
    world: &World,
    shock: Shock,
    impact: Option<&PriceImpact>,
    max_rounds: usize,
) -> Result<StressReport, FlywheelError> {
    let mut world = world.clone();
    stress_in_place(&mut world, shock, impact, max_rounds)
}

pub(crate) fn stress_in_place(
    world: &mut World,
    shock: Shock,
    impact: Option<&PriceImpact>,
    max_rounds: usize,
) -> Result<StressReport, FlywheelError> {
    shock.validate()?;
    let exposure_before = world.credit.exposure;
    let share_price_before = world.company.share_price;
    let mut outcomes: Vec<InvestorOutcome> = world
        .investors
        .iter()
        .map(|i| InvestorOutcome {
            shares_before: i.shares_held,
            debt_before: i.debt,
            residual_debt: i.debt,
            ..Default::default()
        })
        .collect();

    apply(world, shock);

    let mut rounds = 0;
    let converged = loop {
        let haircut = world.credit.haircut;
        let price = world.company.share_price;
        let breached: Vec<usize> = (0..world.investors.len())
            .filter(|&i| world.investors[i].is_undercollateralised(haircut, price))
            .collect();
        if breached.is_empty() {
            break true;
        }
        if rounds == max_rounds {
            break false;
        }
        rounds += 1;
        let mut sold = 0.0;
        for i in breached {
            let inv = &mut world.investors[i];
            let out = &mut outcomes[i];
            out.margin_called = true;
            let needed = if haircut > 0.0 {
                (inv.debt - inv.borrowing_limit(haircut, price)) / (haircut * price)
            } else {
                inv.shares_held
            };
            let shares = needed.min(inv.shares_held);
            let proceeds = shares * price;
            let repaid = proceeds.min(inv.debt);
            inv.shares_held -= shares;
            inv.cash += proceeds - repaid;
            inv.debt -= repaid;
            world.credit.exposure -= repaid;
            out.shares_sold += shares;
            out.recovered += repaid;
            sold += shares;
            if inv.shares_held <= 0.0 {
                inv.shares_held = 0.0;
                out.exhausted = true;
                if inv.debt > 0.0 {
                    out.loss += inv.debt;
                    world.credit.exposure -= inv.debt;
                    inv.debt = 0.0;
                }
            }
        }
        if let Some(impact) = impact {
            let c = &mut world.company;
            c.share_price *= impact.share_factor(-sold / c.shares_outstanding);
        }
        if let Ok(m) = world.company.mnav() {
            world.mnav_level = m;
        }
    };

    for (out, inv) in outcomes.iter_mut().zip(&world.investors) {
        out.residual_debt = inv.debt;
    }
    let report = StressReport {
        shock,
        rounds,
        converged,
        margin_calls: outcomes.iter().filter(|o| o.margin_called).count(),
        shares_liquidated: outcomes.iter().map(|o| o.shares_sold).sum(),
        recovered: outcomes.iter().map(|o| o.recovered).sum(),
        credit_loss: outcomes.iter().map(|o| o.loss).sum(),
        exposure_before,
        exposure_after: world.credit.exposure,
        share_price_before,
        share_price_after: world.company.share_price,
        token_price_after: world.company.token_price,
        haircut_after: world.credit.haircut,
        investors: outcomes,
        world: world.clone(),
    };
    if converged {
        Ok(report)
    } else {
        Err(FlywheelError::NonConvergence {
            rounds,
            report: Box::new(report),
        })
    }
}

fn apply(world: &mut World, shock: Shock) {
    let m = shock.magnitude;
    match shock.kind {
        ShockKind::HaircutRaise => {
            world.haircut_add_on += m;
            world.credit.haircut = (world.credit.haircut + m).min(1.0);
        }
        ShockKind::TokenPriceDrop => {
            world.company.token_price *= 1.0 - m;
            world.company.share_price *= 1.0 - m;
        }
        ShockKind::MnavCompression => {
            let c = &mut world.company;
            c.share_price = m * c.nav() / c.shares_outstanding;
            world.mnav_level = m;
        }
    }
}
