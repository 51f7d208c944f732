use proptest::prelude::*;
use treasury_kelly::{growth_expansion, growth_rate, optimal_fraction, BinaryGame, Fraction};

fn g(p: f64, f: f64) -> f64 {
    growth_rate(BinaryGame::new(p).unwrap(), Fraction::new(f).unwrap()).nats()
}

fn series(p: f64, eps: f64, order: u32) -> f64 {
    growth_expansion(BinaryGame::new(p).unwrap(), eps, order)
        .unwrap()
        .nats()
}

#[test]
fn optimum_beats_every_grid_point() {
    for i in 0..=90 {
        let p = 0.05 + 0.01 * i as f64;
        let best = g(p, 2.0 * p - 1.0);
        for j in -99..=99 {
            let f = j as f64 / 100.0;
            if (f - (2.0 * p - 1.0)).abs() < 1e-9 {
                continue;
            }
            assert!(g(p, f) < best, "p={p} f={f}");
        }
    }
}

#[test]
fn cubic_expansion_error_is_quartic() {
    for p in [0.55, 0.6, 0.7, 0.8, 0.9] {
        let fstar = 2.0 * p - 1.0;
        let m = f64::min(p, 1.0 - p);
        for mag in [1e-3, 3e-3, 1e-2] {
            for eps in [mag, -mag] {
                let err = (g(p, fstar + eps) - series(p, eps, 3)).abs();
                assert!(
                    err <= 10.0 * eps.powi(4) / m.powi(4),
                    "p={p} eps={eps} err={err}"
                );
                let half = (g(p, fstar + eps / 2.0) - series(p, eps / 2.0, 3)).abs();
                let ratio = err / half;
                assert!(
                    (12.0..=20.0).contains(&ratio),
                    "p={p} eps={eps} ratio={ratio}"
                );
            }
        }
    }
}

#[test]
fn quadratic_coefficient_matches_finite_difference() {
    let h = 1e-4;
    for p in [0.55, 0.6, 0.7, 0.8, 0.9] {
        let fstar = 2.0 * p - 1.0;
        let second = (g(p, fstar + h) - 2.0 * g(p, fstar) + g(p, fstar - h)) / (h * h);
        let coefficient = -1.0 / (8.0 * p * (1.0 - p));
        let rel = (second / 2.0 - coefficient).abs() / coefficient.abs();
        assert!(rel < 1e-6, "p={p} rel={rel}");
    }
}

proptest! {
    #[test]
    fn overbetting_loses_more(p in 0.5001f64..0.9999, t in 0.0001f64..0.9999) {
        let fstar = 2.0 * p - 1.0;
        let eps = t * f64::min(2.0 - 2.0 * p, fstar);
        prop_assert!(g(p, fstar - eps) > g(p, fstar + eps));
    }

    #[test]
    fn any_deviation_loses(p in 0.01f64..0.99, eps in 1e-4f64..0.5, sign in prop::bool::ANY) {
        let fstar = optimal_fraction(BinaryGame::new(p).unwrap()).value();
        let f = if sign { fstar + eps } else { fstar - eps };
        prop_assume!(f > -1.0 && f < 1.0);
        prop_assert!(g(p, f) - g(p, fstar) < 0.0);
    }

    #[test]
    fn growth_bounded_by_optimum(p in 0.01f64..0.99, f in -0.99f64..0.99) {
        let bound = std::f64::consts::LN_2 + p * p.ln() + (1.0 - p) * (1.0 - p).ln();
        prop_assert!(g(p, f) <= bound + 1e-15);
    }
}
