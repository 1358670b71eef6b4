use clap::ValueEnum;
use heavyls::envelope::{check_interpolation, InterpFamily};
use heavyls::Error;
use serde_json::json;

use super::{to_json, Output};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Lipschitz,
    Additive,
    MultipleIndex,
}

#[derive(Debug, clap::Args)]
pub struct InterpArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Dimension of the additive family.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lip: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(a: &InterpArgs) -> CliResult<Output> {
    let family = match a.family {
        FamilyName::Lipschitz => InterpFamily::Lipschitz { lip: a.lip },
        FamilyName::Additive => InterpFamily::Additive { d: a.d, lip: a.lip },
        FamilyName::MultipleIndex => InterpFamily::MultipleIndex { lip: a.lip },
    };
    let report = check_interpolation(family, a.samples, a.seed)?;
    if report.violations > 0 {
        return Err(Error::Invariant(format!(
            "{} of {} samples violate the interpolation bound (max ratio {})",
            report.violations, report.samples, report.max_ratio
        ))
        .into());
    }
    let text = to_json(&report)?;
    let mut out = Output::new("interp", text.clone()).file("interp.json", text);
    out.config = json!({ "family": family, "samples": a.samples });
    out.seeds = vec![a.seed];
    Ok(out)
}
