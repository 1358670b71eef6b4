use heavyls::rates::{regime_rows, table_rows};
use serde_json::json;

use super::Output;
use crate::csvio::Table;
use crate::error::CliResult;

pub fn run() -> CliResult<Output> {
    let mut t = Table::new(&["table", "class", "alpha", "s", "independent_moments", "moments"]);
    for r in table_rows() {
        t.push(vec![r.table.to_string(), r.class, r.alpha, r.s, r.independent_moments, r.moments]);
    }
    let mut regimes = Table::new(&["entropy", "envelope_growth", "moments", "rate"]);
    for r in regime_rows() {
        regimes.push(vec![r.entropy.into(), r.envelope_growth.into(), r.moments.into(), r.rate.into()]);
    }
    let csv = t.to_csv()?;
    let mut out = Output::new("tables", csv.clone()).file("tables.csv", csv).file("regimes.csv", regimes.to_csv()?);
    out.config = json!({});
    Ok(out)
}
