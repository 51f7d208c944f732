use std::fmt;

use thiserror::Error;

/// Side of an uncertainty set, relative to its center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

/// Errors raised by the numerical toolkit (Kelly growth, divergences, robust rules).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability must lie strictly inside (0, 1), got {0}")]
    Probability(f64),
    #[error("fraction must lie strictly inside (-1, 1), got {0}")]
    Fraction(f64),
    #[error("unsupported expansion order {order} (expected {expected})")]
    Order { order: u32, expected: &'static str },
    #[error("divergence budget must be finite and >= 0, got {0}")]
    Budget(f64),
    #[error("risk aversion must be finite and >= 0, got {0}")]
    RiskAversion(f64),
    #[error("argument {value} is outside the domain of the {generator} generator")]
    Domain { generator: &'static str, value: f64 },
    #[error(
        "no {side} root: budget {alpha} exceeds the attainable divergence {attainable} on that side"
    )]
    NoRoot {
        side: Side,
        alpha: f64,
        attainable: f64,
    },
    #[error("invalid mixture: {0}")]
    Mixture(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
