//! Kelly fractions that account for an uncertain win probability.
//!
//! Given an [`UncertaintySet`] `{p_minus, p_plus}` around the believed `q`:
//!
//! * worst case bets `2 p_minus - 1`,
//! * best case bets `2 p_plus - 1`,
//! * equal-weighted maximises the 50/50 mixture of both growth curves,
//!   which is `2 * mean(p) - 1` because the growth rate is linear in `p`,
//! * the heuristic discounts the plain Kelly bet, `(2q - 1) exp(-lambda alpha)`.
//!
//! No rule goes short: negative results are clamped to zero and the clamp is
//! reported on [`RobustFraction`].

use serde::Serialize;

use crate::divergence::{solve_uncertainty_set, DivergenceSpec, UncertaintySet};
use crate::error::{Error, Result};
use crate::kelly::{growth_difference, BinaryGame, Fraction};

/// Upper end of the search interval in [`mixture_argmax`].
pub const SEARCH_CEILING: f64 = 1.0 - 1e-9;

/// Stopping width of the golden-section search.
pub const SEARCH_TOLERANCE: f64 = 1e-9;

/// A robust rule's output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustFraction {
    pub fraction: Fraction,
    /// The unclamped rule was negative and has been replaced by 0.
    pub clamped: bool,
}

impl RobustFraction {
    fn clamp(raw: f64) -> Self {
        if raw < 0.0 {
            Self {
                fraction: Fraction::ZERO,
                clamped: true,
            }
        } else {
            Self {
                // 2p - 1 < 1 for p < 1, and exp(-lambda alpha) <= 1.
                fraction: Fraction::new(raw).expect("robust fraction below one"),
                clamped: false,
            }
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.fraction.value()
    }
}

/// Which rule to apply to an uncertainty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RobustPolicy {
    WorstCase,
    BestCase,
    EqualWeighted,
    /// `lambda` is the risk-aversion parameter.
    Heuristic {
        lambda: f64,
    },
}

impl RobustPolicy {
    pub fn apply(&self, set: &UncertaintySet) -> Result<RobustFraction> {
        match *self {
            RobustPolicy::WorstCase => Ok(worst_case_fraction(set)),
            RobustPolicy::BestCase => Ok(best_case_fraction(set)),
            RobustPolicy::EqualWeighted => Ok(equal_weighted_fraction(set)),
            RobustPolicy::Heuristic { lambda } => {
                heuristic_fraction(set.center_q(), set.budget_alpha(), lambda)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RobustPolicy::WorstCase => "worst",
            RobustPolicy::BestCase => "best",
            RobustPolicy::EqualWeighted => "equal",
            RobustPolicy::Heuristic { .. } => "heuristic",
        }
    }
}

pub fn worst_case_fraction(set: &UncertaintySet) -> RobustFraction {
    RobustFraction::clamp(2.0 * set.p_minus() - 1.0)
}

pub fn best_case_fraction(set: &UncertaintySet) -> RobustFraction {
    RobustFraction::clamp(2.0 * set.p_plus() - 1.0)
}

pub fn equal_weighted_fraction(set: &UncertaintySet) -> RobustFraction {
    RobustFraction::clamp(set.p_minus() + set.p_plus() - 1.0)
}

/// `max(0, 2q - 1) * exp(-lambda * alpha)`.
pub fn heuristic_fraction(q: f64, alpha: f64, lambda: f64) -> Result<RobustFraction> {
    BinaryGame::new(q)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Budget(alpha));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::RiskAversion(lambda));
    }
    let kelly = 2.0 * q - 1.0;
    if kelly < 0.0 {
        return Ok(RobustFraction::clamp(kelly));
    }
    Ok(RobustFraction::clamp(kelly * (-lambda * alpha).exp()))
}

/// Maximiser over `[0, 1 - 1e-9]` of `sum_i w_i g(p_i, f)`, by golden-section search.
///
/// Each comparison uses [`growth_difference`], so the search resolves the
/// optimum well below the square-root-of-epsilon limit of comparing raw
/// function values.
pub fn mixture_argmax(probs: &[f64], weights: &[f64]) -> Result<Fraction> {
    if probs.is_empty() {
        return Err(Error::Mixture("empty probability list"));
    }
    if probs.len() != weights.len() {
        return Err(Error::Mixture("probabilities and weights differ in length"));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::Mixture("weights must be finite and non-negative"));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Mixture("weights must sum to 1"));
    }
    let games = probs
        .iter()
        .map(|&p| BinaryGame::new(p))
        .collect::<Result<Vec<_>>>()?;

    // positive when the mixture growth at a exceeds that at b
    let better = |a: f64, b: f64| -> f64 {
        let (a, b) = (point(a), point(b));
        games
            .iter()
            .zip(weights)
            .map(|(g, w)| w * growth_difference(*g, a, b))
            .sum()
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, SEARCH_CEILING);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    while hi - lo > SEARCH_TOLERANCE {
        if better(x1, x2) >= 0.0 {
            hi = x2;
            x2 = x1;
            x1 = hi - inv_phi * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + inv_phi * (hi - lo);
        }
    }
    let mid = 0.5 * (lo + hi);
    // the concave objective peaks at an endpoint when the interior is flat-sided
    let best = [lo, mid, hi]
        .into_iter()
        .reduce(|a, b| if better(b, a) > 0.0 { b } else { a })
        .unwrap_or(mid);
    Ok(point(best))
}

fn point(v: f64) -> Fraction {
    Fraction::new(v).expect("search point inside [0, 1)")
}

/// All four rules side by side for one `(q, alpha)` and divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustReport {
    pub set: UncertaintySet,
    pub kelly: f64,
    pub worst: RobustFraction,
    pub equal: RobustFraction,
    pub best: RobustFraction,
    pub heuristic: RobustFraction,
    pub lambda: f64,
}

pub fn robust_report(
    spec: &DivergenceSpec,
    q: f64,
    alpha: f64,
    lambda: f64,
) -> Result<RobustReport> {
    let set = solve_uncertainty_set(spec, q, alpha)?;
    Ok(RobustReport {
        set,
        kelly: 2.0 * q - 1.0,
        worst: worst_case_fraction(&set),
        equal: equal_weighted_fraction(&set),
        best: best_case_fraction(&set),
        heuristic: heuristic_fraction(q, alpha, lambda)?,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kl_set(q: f64, alpha: f64) -> UncertaintySet {
        solve_uncertainty_set(&DivergenceSpec::Kl, q, alpha).unwrap()
    }

    #[test]
    fn zero_budget_rules_collapse_to_kelly() {
        let set = kl_set(0.6, 0.0);
        for f in [
            worst_case_fraction(&set),
            best_case_fraction(&set),
            equal_weighted_fraction(&set),
        ] {
            assert!((f.value() - 0.2).abs() < 1e-15);
            assert!(!f.clamped);
        }
    }

    #[test]
    fn reference_budget_rules() {
        // roots from the mpmath bisection: 0.550718534328, 0.648614104722
        let set = kl_set(0.6, 0.005);
        assert!((worst_case_fraction(&set).value() - 0.101_437_068_7).abs() < 1e-9);
        assert!((best_case_fraction(&set).value() - 0.297_228_209_4).abs() < 1e-9);
        let eq = equal_weighted_fraction(&set).value();
        assert!((eq - 0.199_332_639_05).abs() < 1e-9);
        assert!(eq < 0.2);
    }

    #[test]
    fn worst_case_clamps_below_even_odds() {
        let set = kl_set(0.55, 0.05);
        assert!(set.p_minus() < 0.5);
        let f = worst_case_fraction(&set);
        assert_eq!(f.value(), 0.0);
        assert!(f.clamped);
    }

    #[test]
    fn heuristic_examples() {
        assert_eq!(
            heuristic_fraction(0.6, 0.0, 3.0).unwrap().value(),
            0.6 * 2.0 - 1.0
        );
        assert_eq!(
            heuristic_fraction(0.6, 0.005, 0.0).unwrap().value(),
            0.6 * 2.0 - 1.0
        );
        let v = heuristic_fraction(0.6, 0.005, 10.0).unwrap().value();
        assert!((v - 0.190_245_884_900_142_8).abs() < 1e-15);
        let short = heuristic_fraction(0.4, 0.005, 1.0).unwrap();
        assert!(short.clamped && short.value() == 0.0);
    }

    #[test]
    fn heuristic_rejects_bad_parameters() {
        assert_eq!(heuristic_fraction(0.6, -1.0, 1.0), Err(Error::Budget(-1.0)));
        assert_eq!(
            heuristic_fraction(0.6, 0.1, -1.0),
            Err(Error::RiskAversion(-1.0))
        );
        assert!(heuristic_fraction(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn mixture_examples() {
        let single = mixture_argmax(&[0.7], &[1.0]).unwrap().value();
        assert!((single - 0.4).abs() < 2e-9);
        let losing = mixture_argmax(&[0.3], &[1.0]).unwrap().value();
        assert!(losing < 2e-9);
        let pair = mixture_argmax(&[0.55, 0.65], &[0.5, 0.5]).unwrap().value();
        assert!((pair - 0.2).abs() < 2e-9);
        let skewed = mixture_argmax(&[0.52, 0.70], &[0.8, 0.2]).unwrap().value();
        assert!((skewed - 0.112).abs() < 2e-9);
    }

    #[test]
    fn mixture_rejects_bad_input() {
        assert!(mixture_argmax(&[], &[]).is_err());
        assert!(mixture_argmax(&[0.6], &[0.5]).is_err());
        assert!(mixture_argmax(&[0.6, 0.7], &[1.0]).is_err());
        assert!(mixture_argmax(&[0.6, 0.7], &[1.5, -0.5]).is_err());
        assert!(mixture_argmax(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn policy_dispatch() {
        let set = kl_set(0.6, 0.005);
        let h = RobustPolicy::Heuristic { lambda: 10.0 }
            .apply(&set)
            .unwrap();
        assert!((h.value() - 0.190_245_884_900_142_8).abs() < 1e-15);
        assert_eq!(
            RobustPolicy::WorstCase.apply(&set).unwrap(),
            worst_case_fraction(&set)
        );
    }
}
