use treasury_kelly::{robust_report, series_diagnostic, solve_uncertainty_set, DivergenceSpec};

use crate::format::{sig, table};
use crate::{Failure, FractionCommand};

fn row(label: &str, values: &[f64]) -> Vec<String> {
    std::iter::once(label.to_string())
        .chain(values.iter().map(|&v| sig(v)))
        .collect()
}

pub fn run(cmd: FractionCommand) -> Result<(), Failure> {
    match cmd {
        FractionCommand::Solve(args) => {
            let spec: DivergenceSpec = args.divergence.into();
            let set = solve_uncertainty_set(&spec, args.q, args.alpha)?;
            let (r_minus, r_plus) = set.residuals();
            let rows = vec![
                vec!["side".into(), "p".into(), "residual".into()],
                row("p_minus", &[set.p_minus(), r_minus]),
                row("p_plus", &[set.p_plus(), r_plus]),
            ];
            print!("{}", table(&rows));
        }
        FractionCommand::Robust { set, lambda } => {
            let spec: DivergenceSpec = set.divergence.into();
            let r = robust_report(&spec, set.q, set.alpha, lambda)?;
            let rows = vec![
                vec!["rule".into(), "fraction".into()],
                row("kelly", &[r.kelly]),
                row("worst", &[r.worst.value()]),
                row("equal", &[r.equal.value()]),
                row("best", &[r.best.value()]),
                row("heuristic", &[r.heuristic.value()]),
            ];
            print!("{}", table(&rows));
        }
        FractionCommand::Series { q, epsilon } => {
            let d = series_diagnostic(q, epsilon)?;
            let rows = vec![
                row("exact", &[d.exact]),
                row("quadratic", &[d.quadratic]),
                row("required_cubic", &[d.required_cubic]),
                row("derivative_cubic", &[d.derivative_cubic]),
                row("printed_cubic", &[d.printed_cubic]),
                row("derivative_error", &[d.derivative_error()]),
                row("printed_error", &[d.printed_error()]),
            ];
            print!("{}", table(&rows));
        }
    }
    Ok(())
}
