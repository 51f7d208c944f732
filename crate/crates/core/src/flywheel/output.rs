//! CSV writers for time series and stress reports.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so the files are lossless and byte-for-byte reproducible.

use std::io::Write;

use super::sim::StepRecord;
use super::stress::StressReport;
use super::FlywheelError;

pub const SERIES_COLUMNS: [&str; 13] = [
    "step",
    "shares",
    "tokens",
    "token_price",
    "share_price",
    "mnav",
    "btc_per_share",
    "btc_yield",
    "btc_gain",
    "btc_dollar_gain",
    "investor_debt",
    "credit_exposure",
    "event_flags",
];

pub const STRESS_COLUMNS: [&str; 14] = [
    "shock_kind",
    "magnitude",
    "rounds",
    "converged",
    "margin_calls",
    "shares_liquidated",
    "recovered",
    "credit_loss",
    "exposure_before",
    "exposure_after",
    "share_price_before",
    "share_price_after",
    "token_price_after",
    "haircut_after",
];

pub fn write_series<W: Write>(out: W, records: &[StepRecord]) -> Result<(), FlywheelError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_COLUMNS)?;
    for r in records {
        let c = &r.company;
        w.write_record([
            r.step.to_string(),
            c.shares_outstanding.to_string(),
            c.tokens_held.to_string(),
            c.token_price.to_string(),
            c.share_price.to_string(),
            r.mnav.to_string(),
            r.kpis.btc_per_share.to_string(),
            r.kpis.btc_yield.to_string(),
            r.kpis.btc_gain.to_string(),
            r.kpis.btc_dollar_gain.to_string(),
            r.investor_debt.to_string(),
            r.credit_exposure.to_string(),
            r.events.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stress<W: Write>(out: W, reports: &[StressReport]) -> Result<(), FlywheelError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STRESS_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.shock.kind.name().to_string(),
            r.shock.magnitude.to_string(),
            r.rounds.to_string(),
            r.converged.to_string(),
            r.margin_calls.to_string(),
            r.shares_liquidated.to_string(),
            r.recovered.to_string(),
            r.credit_loss.to_string(),
            r.exposure_before.to_string(),
            r.exposure_after.to_string(),
            r.share_price_before.to_string(),
            r.share_price_after.to_string(),
            r.token_price_after.to_string(),
            r.haircut_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn series_to_string(records: &[StepRecord]) -> Result<String, FlywheelError> {
    let mut buf = Vec::new();
    write_series(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
