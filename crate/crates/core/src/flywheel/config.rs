//! Scenario configuration, read from TOML.
//!
//! ```toml
//! steps = 10
//! exposure_limit = 1000.0
//! haircut = [0.5]                 # one value, or one per step
//!
//! [company]
//! shares_outstanding = 4.0
//! tokens_held = 1.0
//! token_price = 1.0
//! share_price = 1.0
//!
//! [[investors]]
//! shares_held = 4.0
//! cash = 10.0
//! debt = 0.0
//!
//! [issuance]
//! kind = "shares"                 # or "proceeds"
//! amounts = [1.0]                 # one value, or one per step
//!
//! [mnav]
//! model = "constant"              # "path" (with `path = [...]`) or "impact"
//!
//! [[shocks]]                      # applied at the start of `step`
//! step = 5
//! kind = "token_price_drop"       # "haircut_raise" | "mnav_compression"
//! magnitude = 0.3
//!
//! [[stress]]                      # applied to the final state by `flywheel stress`
//! kind = "haircut_raise"
//! magnitude = 0.5
//! ```

use serde::{Deserialize, Serialize};

use super::state::{CompanyState, InvestorState};
use super::FlywheelError;

/// Lower bound on any multiplicative price response.
pub const MIN_PRICE_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactForm {
    #[default]
    Linear,
    Sqrt,
}

/// Price response to a signed net flow, expressed as a fraction of the
/// outstanding quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceImpact {
    /// Share price response per unit of net share flow fraction.
    pub share_impact: f64,
    /// Token price response per unit of tokens bought over `token_supply`.
    pub token_impact: f64,
    /// Proxy for tokens outstanding in the market.
    pub token_supply: f64,
    #[serde(default)]
    pub form: ImpactForm,
}

impl PriceImpact {
    /// Multiplicative price factor for a signed flow fraction.
    pub fn factor(form: ImpactForm, coefficient: f64, flow: f64) -> f64 {
        let response = match form {
            ImpactForm::Linear => coefficient * flow,
            ImpactForm::Sqrt => coefficient * flow.signum() * flow.abs().sqrt(),
        };
        (1.0 + response).max(MIN_PRICE_FACTOR)
    }

    pub fn share_factor(&self, flow: f64) -> f64 {
        Self::factor(self.form, self.share_impact, flow)
    }

    pub fn token_factor(&self, tokens_bought: f64) -> f64 {
        Self::factor(
            self.form,
            self.token_impact,
            tokens_bought / self.token_supply,
        )
    }
}

/// How the share price follows the balance sheet.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum MnavModel {
    /// mNAV stays at its current level; the share price tracks NAV per share.
    #[default]
    Constant,
    /// mNAV follows a prescribed per-step path (last value held).
    Path { path: Vec<f64> },
    /// Share and token prices respond to flows; mNAV floats.
    Impact(PriceImpact),
}

impl MnavModel {
    pub fn impact(&self) -> Option<&PriceImpact> {
        match self {
            MnavModel::Impact(impact) => Some(impact),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssuanceKind {
    /// Amounts are share counts.
    #[default]
    Shares,
    /// Amounts are currency to raise, converted at the prevailing share price.
    Proceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Issuance {
    #[serde(default)]
    pub kind: IssuanceKind,
    pub amounts: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockKind {
    /// Haircut rises by `magnitude` (capped at 1).
    HaircutRaise,
    /// Token price falls by the fraction `magnitude`; mNAV is held.
    TokenPriceDrop,
    /// mNAV is reset to the target `magnitude`.
    MnavCompression,
}

impl ShockKind {
    pub fn name(self) -> &'static str {
        match self {
            ShockKind::HaircutRaise => "haircut_raise",
            ShockKind::TokenPriceDrop => "token_price_drop",
            ShockKind::MnavCompression => "mnav_compression",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shock {
    pub kind: ShockKind,
    pub magnitude: f64,
}

impl Shock {
    pub fn haircut_raise(delta: f64) -> Self {
        Self {
            kind: ShockKind::HaircutRaise,
            magnitude: delta,
        }
    }

    pub fn token_price_drop(fraction: f64) -> Self {
        Self {
            kind: ShockKind::TokenPriceDrop,
            magnitude: fraction,
        }
    }

    pub fn mnav_compression(target: f64) -> Self {
        Self {
            kind: ShockKind::MnavCompression,
            magnitude: target,
        }
    }

    pub fn validate(&self) -> Result<(), FlywheelError> {
        let m = self.magnitude;
        let ok = match self.kind {
            ShockKind::HaircutRaise => (0.0..=1.0).contains(&m),
            ShockKind::TokenPriceDrop => (0.0..1.0).contains(&m),
            ShockKind::MnavCompression => m > 0.0 && m.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(FlywheelError::InvalidShock {
                kind: self.kind.name(),
                magnitude: m,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockEvent {
    pub step: usize,
    pub kind: ShockKind,
    pub magnitude: f64,
}

impl ShockEvent {
    pub fn shock(&self) -> Shock {
        Shock {
            kind: self.kind,
            magnitude: self.magnitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of steps to simulate.
    pub steps: usize,
    pub company: CompanyState,
    pub investors: Vec<InvestorState>,
    pub issuance: Issuance,
    #[serde(default)]
    pub mnav: MnavModel,
    pub haircut: Vec<f64>,
    pub exposure_limit: f64,
    #[serde(default)]
    pub shocks: Vec<ShockEvent>,
    #[serde(default)]
    pub stress: Vec<Shock>,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> FlywheelError {
    FlywheelError::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// A schedule is one value held throughout, or one value per step.
fn check_schedule(field: &str, values: &[f64], steps: usize) -> Result<(), FlywheelError> {
    if values.is_empty() {
        return Err(invalid(field, "schedule must not be empty"));
    }
    if values.len() != 1 && values.len() != steps {
        return Err(invalid(
            field,
            format!("expected 1 or {steps} values, got {}", values.len()),
        ));
    }
    Ok(())
}

fn schedule_at(values: &[f64], step: usize) -> f64 {
    values[step.min(values.len() - 1)]
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, FlywheelError> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| FlywheelError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serialises")
    }

    pub fn validate(&self) -> Result<(), FlywheelError> {
        self.company
            .validate()
            .map_err(|e| invalid("company", e.to_string()))?;
        if self.company.nav() <= 0.0 {
            return Err(invalid("company.tokens_held", "token NAV must be > 0"));
        }
        if self.investors.is_empty() {
            return Err(invalid("investors", "at least one investor is required"));
        }
        for (i, inv) in self.investors.iter().enumerate() {
            for (name, v) in [
                ("shares_held", inv.shares_held),
                ("cash", inv.cash),
                ("debt", inv.debt),
            ] {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(invalid(
                        format!("investors[{i}].{name}"),
                        "must be finite and >= 0",
                    ));
                }
            }
        }
        check_schedule("issuance.amounts", &self.issuance.amounts, self.steps)?;
        if let Some(i) = self
            .issuance
            .amounts
            .iter()
            .position(|a| !(*a >= 0.0 && a.is_finite()))
        {
            return Err(invalid(
                format!("issuance.amounts[{i}]"),
                "must be finite and >= 0",
            ));
        }
        check_schedule("haircut", &self.haircut, self.steps)?;
        if let Some(i) = self.haircut.iter().position(|h| !(0.0..=1.0).contains(h)) {
            return Err(invalid(format!("haircut[{i}]"), "must lie in [0, 1]"));
        }
        if self.exposure_limit.is_nan() || self.exposure_limit < 0.0 {
            return Err(invalid("exposure_limit", "must be >= 0"));
        }
        match &self.mnav {
            MnavModel::Constant => {}
            MnavModel::Path { path } => {
                check_schedule("mnav.path", path, self.steps)?;
                if let Some(i) = path.iter().position(|m| !(*m > 0.0 && m.is_finite())) {
                    return Err(invalid(format!("mnav.path[{i}]"), "must be > 0"));
                }
            }
            MnavModel::Impact(impact) => {
                for (name, v) in [
                    ("share_impact", impact.share_impact),
                    ("token_impact", impact.token_impact),
                ] {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(invalid(format!("mnav.{name}"), "must be finite and >= 0"));
                    }
                }
                if !(impact.token_supply > 0.0 && impact.token_supply.is_finite()) {
                    return Err(invalid("mnav.token_supply", "must be > 0"));
                }
            }
        }
        for (i, event) in self.shocks.iter().enumerate() {
            if event.step >= self.steps {
                return Err(invalid(
                    format!("shocks[{i}].step"),
                    format!(
                        "step {} is outside the horizon of {} steps",
                        event.step, self.steps
                    ),
                ));
            }
            event
                .shock()
                .validate()
                .map_err(|e| invalid(format!("shocks[{i}]"), e.to_string()))?;
        }
        for (i, shock) in self.stress.iter().enumerate() {
            shock
                .validate()
                .map_err(|e| invalid(format!("stress[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn haircut_at(&self, step: usize) -> f64 {
        schedule_at(&self.haircut, step)
    }

    pub fn issuance_at(&self, step: usize) -> f64 {
        schedule_at(&self.issuance.amounts, step)
    }

    pub fn mnav_path_at(&self, step: usize) -> Option<f64> {
        match &self.mnav {
            MnavModel::Path { path } => Some(schedule_at(path, step)),
            _ => None,
        }
    }

    pub fn shocks_at(&self, step: usize) -> impl Iterator<Item = Shock> + '_ {
        self.shocks
            .iter()
            .filter(move |e| e.step == step)
            .map(ShockEvent::shock)
    }
}
