use clap::ValueEnum;
use heavyls::rates::{predict, rate_with_constants, Entropy, RateConstants, RegimeInput};
use serde_json::json;

use super::{to_json, Output};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeName {
    #[value(alias = "bracketing_l2")]
    Bracketing,
    #[value(alias = "sup_norm")]
    Supnorm,
    #[value(alias = "vc_type")]
    Vc,
}

#[derive(Debug, clap::Args)]
pub struct PredictArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeName,
    #[arg(long)]
    pub alpha: f64,
    /// Log power of the VC-type entropy.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Envelope growth exponent.
    #[arg(long)]
    pub s: f64,
    /// Error moments; unbounded when omitted.
    #[arg(long)]
    pub q: Option<f64>,
    /// Also evaluate the rate with constants at this sample size.
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, default_value_t = 1.0, requires = "n")]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, requires = "n")]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0, requires = "n")]
    pub sigma: f64,
}

pub fn run(a: &PredictArgs) -> CliResult<Output> {
    let entropy = match a.regime {
        RegimeName::Bracketing => Entropy::BracketingL2,
        RegimeName::Supnorm => Entropy::SupNorm,
        RegimeName::Vc => Entropy::VcType,
    };
    let input = RegimeInput { entropy, alpha: a.alpha, beta: a.beta, s: a.s, q: a.q.unwrap_or(f64::INFINITY) };
    let prediction = predict(&input)?;
    let mut value = serde_json::to_value(&prediction)?;
    if let Some(n) = a.n {
        let c = RateConstants { a: a.a, phi: a.phi, sigma: a.sigma };
        value["with_constants"] = serde_json::to_value(rate_with_constants(&input, n, &c)?)?;
    }
    let mut out = Output::new("predict", to_json(&value)?);
    out.files.push(("prediction.json".into(), out.stdout.clone()));
    out.config = json!({ "input": input });
    Ok(out)
}
