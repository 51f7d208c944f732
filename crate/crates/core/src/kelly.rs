//! Log-growth of the binary double-or-nothing game.
//!
//! A bettor staking a fraction `f` of wealth wins `+f` with probability `p`
//! and loses `-f` otherwise, so the expected log-growth per round is
//!
//! ```text
//! g(p, f) = p ln(1 + f) + (1 - p) ln(1 - f)
//! ```
//!
//! maximised at `f* = 2p - 1`. Around the optimum, with `f = f* + eps`,
//!
//! ```text
//! g = g(p, f*) - eps^2 / (8 p (1-p)) - (2p - 1) eps^3 / (24 p^2 (1-p)^2) + O(eps^4)
//! ```
//!
//! The negative cubic term (for `p > 1/2`) makes over-betting costlier than
//! under-betting by the same amount.
//!
//! Everything is computed in nats. [`GrowthRate::bits`] converts for display.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Win probability of a double-or-nothing bet, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BinaryGame(f64);

impl BinaryGame {
    pub fn new(win_prob: f64) -> Result<Self> {
        if win_prob > 0.0 && win_prob < 1.0 {
            Ok(Self(win_prob))
        } else {
            Err(Error::Probability(win_prob))
        }
    }

    #[inline]
    pub fn win_prob(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BinaryGame {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<BinaryGame> for f64 {
    fn from(game: BinaryGame) -> f64 {
        game.0
    }
}

/// Fraction of wealth staked. Negative values bet on the losing side.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Fraction(f64);

impl Fraction {
    pub const ZERO: Fraction = Fraction(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > -1.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Fraction(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fraction {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Fraction> for f64 {
    fn from(f: Fraction) -> f64 {
        f.0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Unit a growth rate is reported in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

/// Expected log-growth per round, stored in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GrowthRate(f64);

impl GrowthRate {
    #[inline]
    pub fn from_nats(nats: f64) -> Self {
        Self(nats)
    }

    #[inline]
    pub fn nats(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn bits(self) -> f64 {
        self.0 / LN_2
    }

    pub fn in_unit(self, unit: Unit) -> f64 {
        match unit {
            Unit::Nats => self.nats(),
            Unit::Bits => self.bits(),
        }
    }
}

/// `p ln(1+f) + (1-p) ln(1-f)`, in nats.
pub fn growth_rate(game: BinaryGame, f: Fraction) -> GrowthRate {
    let p = game.win_prob();
    let f = f.value();
    GrowthRate(p * f.ln_1p() + (1.0 - p) * (-f).ln_1p())
}

/// `g(p, a) - g(p, b)` without the cancellation of subtracting two growth rates.
///
/// Accurate relative to the size of the difference, which is what a
/// comparison-based maximiser needs near a flat optimum.
pub fn growth_difference(game: BinaryGame, a: Fraction, b: Fraction) -> f64 {
    let p = game.win_prob();
    let (a, b) = (a.value(), b.value());
    let d = a - b;
    p * (d / (1.0 + b)).ln_1p() + (1.0 - p) * (-d / (1.0 - b)).ln_1p()
}

/// The log-optimal fraction `2p - 1`.
pub fn optimal_fraction(game: BinaryGame) -> Fraction {
    // |2p - 1| < 1 for every p in (0, 1).
    Fraction(2.0 * game.win_prob() - 1.0)
}

/// Growth at the optimum: `ln 2 + p ln p + (1-p) ln(1-p)`.
///
/// Evaluated as `g(p, 2p - 1)` so that the result keeps full relative
/// precision near `p = 1/2`, where the closed form cancels.
pub fn optimal_growth(game: BinaryGame) -> GrowthRate {
    growth_rate(game, optimal_fraction(game))
}

/// Truncated expansion of the growth rate at `f = 2p - 1 + epsilon`.
///
/// `order` is 2 (quadratic loss only) or 3 (adds the asymmetric cubic term).
pub fn growth_expansion(game: BinaryGame, epsilon: f64, order: u32) -> Result<GrowthRate> {
    if !(2..=3).contains(&order) {
        return Err(Error::Order {
            order,
            expected: "2 or 3",
        });
    }
    let p = game.win_prob();
    let f = 2.0 * p - 1.0 + epsilon;
    if !(f > -1.0 && f < 1.0) {
        return Err(Error::Fraction(f));
    }
    let q = 1.0 - p;
    let mut value = optimal_growth(game).nats() - epsilon * epsilon / (8.0 * p * q);
    if order == 3 {
        value -= (2.0 * p - 1.0) * epsilon.powi(3) / (24.0 * p * p * q * q);
    }
    Ok(GrowthRate(value))
}
