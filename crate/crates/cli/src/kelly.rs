use treasury_kelly::{growth_expansion, growth_rate, optimal_fraction, BinaryGame, Fraction, Unit};

use crate::format::{sig, table};
use crate::{Failure, KellyCommand};

pub fn run(cmd: KellyCommand) -> Result<(), Failure> {
    match cmd {
        KellyCommand::Growth { p, f, unit } => {
            let g = growth_rate(BinaryGame::new(p)?, Fraction::new(f)?);
            println!("{}", sig(g.in_unit(unit.into())));
        }
        KellyCommand::Optimal { p } => {
            println!("{}", sig(optimal_fraction(BinaryGame::new(p)?).value()));
        }
        KellyCommand::Expand {
            p,
            epsilon,
            order,
            unit,
        } => {
            let game = BinaryGame::new(p)?;
            let unit: Unit = unit.into();
            let series = growth_expansion(game, epsilon, order)?.in_unit(unit);
            let f = Fraction::new(optimal_fraction(game).value() + epsilon)?;
            let exact = growth_rate(game, f).in_unit(unit);
            let rows = [
                ("exact", exact),
                ("series", series),
                ("difference", exact - series),
            ]
            .map(|(k, v)| vec![k.to_string(), sig(v)]);
            print!("{}", table(&rows));
        }
    }
    Ok(())
}
