//! Divergences between win probabilities and the uncertainty sets they induce.
//!
//! The uncertainty model fixes a believed probability `q` and a budget
//! `alpha`; the true probability is one of the two points `p` with
//! `D(q || p) = alpha`. The Bernoulli KL used here is written with `p` inside
//! the logarithms,
//!
//! ```text
//! D(q || p) = p ln(p / q) + (1 - p) ln((1 - p) / (1 - q))
//! ```
//!
//! which is the Bregman divergence `B_phi(p, q)` of the Bernoulli negentropy
//! `phi(t) = t ln t + (1 - t) ln(1 - t)`. Other families plug in their own
//! generator through [`DivergenceSpec`].
//!
//! Roots are found by bracketed bisection on the exact divergence, never on a
//! truncated series.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Side};

/// Lower/upper bracket offset from the probability boundaries.
pub const BRACKET_OFFSET: f64 = 1e-15;

/// Residual the solver is expected to reach.
pub const ROOT_TOLERANCE: f64 = 1e-12;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A caller-supplied strictly convex generator on `(0, 1)` and its derivative.
#[derive(Clone)]
pub struct CustomGenerator {
    name: String,
    value: ScalarFn,
    derivative: ScalarFn,
}

impl CustomGenerator {
    pub fn new<F, D>(name: impl Into<String>, value: F, derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGenerator")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// Which divergence measures the distance between believed and true odds.
#[derive(Debug, Clone)]
pub enum DivergenceSpec {
    /// Bernoulli Kullback-Leibler.
    Kl,
    /// Itakura-Saito, generator `-ln t`.
    ItakuraSaito,
    /// Squared Euclidean, generator `t^2`.
    SquaredEuclidean,
    CustomGenerator(CustomGenerator),
}

impl DivergenceSpec {
    pub fn name(&self) -> &str {
        match self {
            DivergenceSpec::Kl => "kl",
            DivergenceSpec::ItakuraSaito => "itakura-saito",
            DivergenceSpec::SquaredEuclidean => "squared-euclidean",
            DivergenceSpec::CustomGenerator(g) => g.name(),
        }
    }

    fn in_domain(&self, t: f64) -> bool {
        match self {
            DivergenceSpec::Kl | DivergenceSpec::CustomGenerator(_) => t > 0.0 && t < 1.0,
            DivergenceSpec::ItakuraSaito => t > 0.0 && t.is_finite(),
            DivergenceSpec::SquaredEuclidean => t.is_finite(),
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.in_domain(t) {
            Ok(())
        } else {
            let generator = match self {
                DivergenceSpec::Kl => "kl",
                DivergenceSpec::ItakuraSaito => "itakura-saito",
                DivergenceSpec::SquaredEuclidean => "squared-euclidean",
                DivergenceSpec::CustomGenerator(_) => "custom",
            };
            Err(Error::Domain {
                generator,
                value: t,
            })
        }
    }

    /// Generator `phi(t)`.
    pub fn generator(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self {
            DivergenceSpec::Kl => t * t.ln() + (1.0 - t) * (-t).ln_1p(),
            DivergenceSpec::ItakuraSaito => -t.ln(),
            DivergenceSpec::SquaredEuclidean => t * t,
            DivergenceSpec::CustomGenerator(g) => (g.value)(t),
        })
    }

    /// Generator derivative `phi'(t)`.
    pub fn generator_derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self {
            DivergenceSpec::Kl => t.ln() - (-t).ln_1p(),
            DivergenceSpec::ItakuraSaito => -1.0 / t,
            DivergenceSpec::SquaredEuclidean => 2.0 * t,
            DivergenceSpec::CustomGenerator(g) => (g.derivative)(t),
        })
    }

    /// Divergence of a candidate true probability `p` from the believed `q`.
    ///
    /// This is what uncertainty sets are built from. KL and squared Euclidean
    /// use the scalar Bregman divergence `B(p, q)` directly (the KL generator
    /// already covers both outcomes). Itakura-Saito is applied to the outcome
    /// pair `(p, 1-p)` against `(q, 1-q)`, the same lift that turns `t ln t`
    /// into the Bernoulli KL; on the bare win probability it would weight
    /// only the winning outcome. Custom generators are used as supplied.
    pub fn between(&self, q: f64, p: f64) -> Result<f64> {
        match self {
            DivergenceSpec::Kl => kl_bernoulli(q, p),
            DivergenceSpec::ItakuraSaito => {
                check_probability(q)?;
                check_probability(p)?;
                Ok(itakura_saito(p, q) + itakura_saito(1.0 - p, 1.0 - q))
            }
            DivergenceSpec::SquaredEuclidean => {
                check_probability(q)?;
                check_probability(p)?;
                Ok((p - q) * (p - q))
            }
            DivergenceSpec::CustomGenerator(_) => bregman(self, p, q),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

fn itakura_saito(x: f64, y: f64) -> f64 {
    let d = (x - y) / y;
    d - d.ln_1p()
}

/// Bernoulli KL with `p` inside the logarithms:
/// `p ln(p/q) + (1-p) ln((1-p)/(1-q))`.
pub fn kl_bernoulli(q: f64, p: f64) -> Result<f64> {
    check_probability(q)?;
    check_probability(p)?;
    let d = p - q;
    Ok(p * (d / q).ln_1p() + (1.0 - p) * (-d / (1.0 - q)).ln_1p())
}

/// Which form of the KL power series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariant {
    /// The coefficients exactly as commonly printed for this expansion.
    /// Its cubic coefficient `-(1/6)((1-q)^2 + q^2) / (q^2 (1-q)^2)` does
    /// not match the Taylor series of [`kl_bernoulli`].
    AsPrinted,
    /// Taylor series of [`kl_bernoulli`] in `p` about `q`.
    DerivativeBased,
}

/// Coefficient of `eps^n` (n in 2..=5) in the chosen KL series.
pub fn kl_series_coefficient(q: f64, n: u32, variant: SeriesVariant) -> Result<f64> {
    check_probability(q)?;
    if !(2..=5).contains(&n) {
        return Err(Error::Order {
            order: n,
            expected: "2..=5",
        });
    }
    let r = 1.0 - q;
    let k = n as i32;
    Ok(match variant {
        SeriesVariant::DerivativeBased => {
            // n-th derivative of t ln t is (-1)^n (n-2)! / t^(n-1)
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            (sign / q.powi(k - 1) + 1.0 / r.powi(k - 1)) / f64::from(n * (n - 1))
        }
        SeriesVariant::AsPrinted => match n {
            2 => 1.0 / (2.0 * r * q),
            3 => -(r * r + q * q) / (6.0 * r.powi(2) * q.powi(2)),
            4 => (r.powi(3) - q.powi(3)) / (12.0 * r.powi(3) * q.powi(3)),
            _ => -(r.powi(4) + q.powi(4)) / (20.0 * r.powi(4) * q.powi(4)),
        },
    })
}

/// KL series in `eps = p - q`, truncated after the `eps^order` term.
pub fn kl_series(q: f64, epsilon: f64, variant: SeriesVariant, order: u32) -> Result<f64> {
    check_probability(q)?;
    check_probability(q + epsilon)?;
    if !(2..=5).contains(&order) {
        return Err(Error::Order {
            order,
            expected: "2..=5",
        });
    }
    (2..=order).try_fold(0.0, |acc, n| {
        Ok(acc + kl_series_coefficient(q, n, variant)? * epsilon.powi(n as i32))
    })
}

/// Side-by-side comparison of the two cubic KL series against the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesDiagnostic {
    pub q: f64,
    pub epsilon: f64,
    pub exact: f64,
    pub quadratic: f64,
    /// `exact - quadratic`: what a correct cubic term has to supply.
    pub required_cubic: f64,
    pub derivative_cubic: f64,
    pub printed_cubic: f64,
}

impl SeriesDiagnostic {
    pub fn derivative_error(&self) -> f64 {
        self.exact - (self.quadratic + self.derivative_cubic)
    }

    pub fn printed_error(&self) -> f64 {
        self.exact - (self.quadratic + self.printed_cubic)
    }
}

pub fn series_diagnostic(q: f64, epsilon: f64) -> Result<SeriesDiagnostic> {
    let exact = kl_bernoulli(q, q + epsilon)?;
    let quadratic = kl_series_coefficient(q, 2, SeriesVariant::DerivativeBased)? * epsilon.powi(2);
    let cube = epsilon.powi(3);
    Ok(SeriesDiagnostic {
        q,
        epsilon,
        exact,
        quadratic,
        required_cubic: exact - quadratic,
        derivative_cubic: kl_series_coefficient(q, 3, SeriesVariant::DerivativeBased)? * cube,
        printed_cubic: kl_series_coefficient(q, 3, SeriesVariant::AsPrinted)? * cube,
    })
}

/// Bregman divergence `phi(x) - phi(y) - phi'(y) (x - y)`.
///
/// Built-in families use their closed forms; a custom generator goes through
/// the definition.
pub fn bregman(spec: &DivergenceSpec, x: f64, y: f64) -> Result<f64> {
    spec.check(x)?;
    spec.check(y)?;
    let value = match spec {
        DivergenceSpec::Kl => return kl_bernoulli(y, x),
        DivergenceSpec::ItakuraSaito => itakura_saito(x, y),
        DivergenceSpec::SquaredEuclidean => (x - y) * (x - y),
        DivergenceSpec::CustomGenerator(g) => {
            (g.value)(x) - (g.value)(y) - (g.derivative)(y) * (x - y)
        }
    };
    if value.is_nan() {
        return Err(Error::Domain {
            generator: "custom",
            value: x,
        });
    }
    Ok(value)
}

/// The two probabilities at divergence `budget_alpha` from `center_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintySet {
    center_q: f64,
    budget_alpha: f64,
    p_minus: f64,
    p_plus: f64,
    residual_minus: f64,
    residual_plus: f64,
}

impl UncertaintySet {
    pub fn center_q(&self) -> f64 {
        self.center_q
    }

    pub fn budget_alpha(&self) -> f64 {
        self.budget_alpha
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// `D(q || p) - alpha` at `(p_minus, p_plus)`.
    pub fn residuals(&self) -> (f64, f64) {
        (self.residual_minus, self.residual_plus)
    }
}

/// Inverts `D(q || p) = alpha` on both sides of `q`.
pub fn solve_uncertainty_set(spec: &DivergenceSpec, q: f64, alpha: f64) -> Result<UncertaintySet> {
    check_probability(q)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Budget(alpha));
    }
    if alpha == 0.0 {
        return Ok(UncertaintySet {
            center_q: q,
            budget_alpha: 0.0,
            p_minus: q,
            p_plus: q,
            residual_minus: 0.0,
            residual_plus: 0.0,
        });
    }
    let residual = |p: f64| -> Result<f64> {
        let d = spec.between(q, p)?;
        if d.is_nan() {
            return Err(Error::Domain {
                generator: "custom",
                value: p,
            });
        }
        Ok(d - alpha)
    };
    let (p_minus, residual_minus) = solve_side(&residual, Side::Lower, q, alpha)?;
    let (p_plus, residual_plus) = solve_side(&residual, Side::Upper, q, alpha)?;
    Ok(UncertaintySet {
        center_q: q,
        budget_alpha: alpha,
        p_minus,
        p_plus,
        residual_minus,
        residual_plus,
    })
}

fn solve_side(
    residual: &dyn Fn(f64) -> Result<f64>,
    side: Side,
    q: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    let edge = match side {
        Side::Lower => BRACKET_OFFSET,
        Side::Upper => 1.0 - BRACKET_OFFSET,
    };
    let r_edge = residual(edge)?;
    if r_edge < 0.0 {
        return Err(Error::NoRoot {
            side,
            alpha,
            attainable: r_edge + alpha,
        });
    }
    // residual is negative at q, non-negative at the edge
    let (mut inside, mut outside) = (q, edge);
    let (mut r_in, mut r_out) = (-alpha, r_edge);
    loop {
        let mid = inside + 0.5 * (outside - inside);
        if mid == inside || mid == outside {
            break;
        }
        let r = residual(mid)?;
        if r == 0.0 {
            return Ok((mid, 0.0));
        }
        if r < 0.0 {
            inside = mid;
            r_in = r;
        } else {
            outside = mid;
            r_out = r;
        }
    }
    Ok(if r_in.abs() <= r_out.abs() {
        (inside, r_in)
    } else {
        (outside, r_out)
    })
}
