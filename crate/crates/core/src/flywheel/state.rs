use serde::{Deserialize, Serialize};

use super::FlywheelError;

/// Balance sheet of an idealised debt-free treasury company.
///
/// Enterprise value equals market capitalisation, and the only asset is the
/// token treasury.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanyState {
    pub shares_outstanding: f64,
    pub tokens_held: f64,
    pub token_price: f64,
    pub share_price: f64,
}

impl CompanyState {
    pub fn new(
        shares_outstanding: f64,
        tokens_held: f64,
        token_price: f64,
        share_price: f64,
    ) -> Result<Self, FlywheelError> {
        let state = Self {
            shares_outstanding,
            tokens_held,
            token_price,
            share_price,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<(), FlywheelError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.shares_outstanding) {
            return Err(FlywheelError::InvalidState(
                "shares_outstanding must be > 0",
            ));
        }
        if !(self.tokens_held >= 0.0 && self.tokens_held.is_finite()) {
            return Err(FlywheelError::InvalidState("tokens_held must be >= 0"));
        }
        if !positive(self.token_price) {
            return Err(FlywheelError::InvalidState("token_price must be > 0"));
        }
        if !positive(self.share_price) {
            return Err(FlywheelError::InvalidState("share_price must be > 0"));
        }
        Ok(())
    }

    #[inline]
    pub fn market_cap(&self) -> f64 {
        self.shares_outstanding * self.share_price
    }

    #[inline]
    pub fn nav(&self) -> f64 {
        self.tokens_held * self.token_price
    }

    /// Tokens per share.
    #[inline]
    pub fn btc_per_share(&self) -> f64 {
        self.tokens_held / self.shares_outstanding
    }

    pub fn mnav(&self) -> Result<f64, FlywheelError> {
        mnav(self)
    }
}

/// Market capitalisation over token NAV.
pub fn mnav(state: &CompanyState) -> Result<f64, FlywheelError> {
    let nav = state.nav();
    if nav <= 0.0 {
        return Err(FlywheelError::ZeroNav);
    }
    Ok(state.market_cap() / nav)
}

/// Issues `new_shares` at the prevailing share price, converts the proceeds
/// into tokens at the prevailing token price, and reprices the stock so that
/// mNAV is unchanged.
///
/// Tokens per share rises exactly when mNAV is above one.
pub fn issue_and_buy(state: &CompanyState, new_shares: f64) -> Result<CompanyState, FlywheelError> {
    if !(new_shares > 0.0 && new_shares.is_finite()) {
        return Err(FlywheelError::NonPositiveIssuance(new_shares));
    }
    let mnav_before = mnav(state)?;
    let proceeds = new_shares * state.share_price;
    let tokens_held = state.tokens_held + proceeds / state.token_price;
    let shares_outstanding = state.shares_outstanding + new_shares;
    let nav = tokens_held * state.token_price;
    Ok(CompanyState {
        shares_outstanding,
        tokens_held,
        token_price: state.token_price,
        share_price: mnav_before * nav / shares_outstanding,
    })
}

/// Treasury KPIs for a transition between two company states.
///
/// Yield is the relative change in tokens per share, gain is the yield
/// expressed in tokens on the opening holdings, and dollar gain values that
/// at the closing token price.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Kpis {
    pub btc_per_share: f64,
    pub btc_yield: f64,
    pub btc_gain: f64,
    pub btc_dollar_gain: f64,
}

pub fn kpis(before: &CompanyState, after: &CompanyState) -> Result<Kpis, FlywheelError> {
    let bps_before = before.btc_per_share();
    if bps_before <= 0.0 {
        return Err(FlywheelError::ZeroBtcPerShare);
    }
    let btc_per_share = after.btc_per_share();
    let btc_yield = (btc_per_share - bps_before) / bps_before;
    let btc_gain = before.tokens_held * btc_yield;
    Ok(Kpis {
        btc_per_share,
        btc_yield,
        btc_gain,
        btc_dollar_gain: btc_gain * after.token_price,
    })
}

/// A shareholder who may borrow against their stock.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestorState {
    pub shares_held: f64,
    #[serde(default)]
    pub cash: f64,
    #[serde(default)]
    pub debt: f64,
}

impl InvestorState {
    #[inline]
    pub fn portfolio_value(&self, share_price: f64) -> f64 {
        self.shares_held * share_price
    }

    /// Maximum debt the collateral supports: `(1 - h) * portfolio value`.
    #[inline]
    pub fn borrowing_limit(&self, haircut: f64, share_price: f64) -> f64 {
        (1.0 - haircut) * self.portfolio_value(share_price)
    }

    /// Unused borrowing capacity, never negative.
    pub fn headroom(&self, haircut: f64, share_price: f64) -> f64 {
        (self.borrowing_limit(haircut, share_price) - self.debt).max(0.0)
    }

    /// Debt exceeds the collateral limit by more than rounding.
    pub fn is_undercollateralised(&self, haircut: f64, share_price: f64) -> bool {
        self.debt - self.borrowing_limit(haircut, share_price)
            > COLLATERAL_SLACK * self.debt.max(1.0)
    }
}

/// Relative slack when testing the collateral constraint.
pub const COLLATERAL_SLACK: f64 = 1e-12;

/// Lender to shareholders, taking their stock as collateral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CreditProvider {
    pub haircut: f64,
    pub exposure: f64,
    pub exposure_limit: f64,
}

impl CreditProvider {
    /// Lending still available under the exposure limit.
    pub fn room(&self) -> f64 {
        (self.exposure_limit - self.exposure).max(0.0)
    }
}
