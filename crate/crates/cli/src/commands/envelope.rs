use clap::ValueEnum;
use heavyls::envelope::{default_deltas, envelope_profile, profile_abscissae, EnvelopeMethod, EnvelopeNorm};
use serde_json::json;

use super::{parse_truth, to_json, ClassArgs, Output};
use crate::csvio::Table;
use crate::error::{bad_arg, CliResult};
use crate::figures::{envelope_band, envelope_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Analytic,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormName {
    Sup,
    L2,
    L3,
}

#[derive(Debug, clap::Args)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// Centre of the envelope: zero, identity, square, sin2pi, constant:v or linear:a,b.
    #[arg(long, default_value = "zero")]
    pub f0: String,
    /// Radii, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<f64>,
    /// Evaluation points, comma-separated; a band over a grid is written when omitted.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[arg(long, value_enum, default_value = "analytic")]
    pub method: MethodName,
    /// Grid resolution of the projection oracle.
    #[arg(long, default_value_t = 256)]
    pub grid_m: usize,
    /// Number of band abscissae (grid midpoints).
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Fit the growth exponent of the envelope norm instead of listing values.
    #[arg(long)]
    pub growth: bool,
    #[arg(long, value_enum, default_value = "l2")]
    pub norm: NormName,
    /// Abscissae per half of the grid in growth profiles.
    #[arg(long, default_value_t = 16)]
    pub per_half: usize,
}

pub fn run(a: &EnvelopeArgs) -> CliResult<Output> {
    let class = a.class.class()?;
    let center = parse_truth(&a.f0)?;
    let method = match a.method {
        MethodName::Analytic => EnvelopeMethod::Analytic,
        MethodName::Oracle => EnvelopeMethod::Oracle { grid_m: a.grid_m },
    };
    let config = json!({ "class": class, "f0": center, "method": method, "delta": a.delta, "x": a.x });
    if a.growth {
        let deltas = if a.delta.is_empty() { default_deltas() } else { a.delta.clone() };
        let xs = profile_abscissae(a.grid_m, a.per_half);
        let profile = envelope_profile(&class, &center, &deltas, method, &xs)?;
        let norm = match a.norm {
            NormName::Sup => EnvelopeNorm::Sup,
            NormName::L2 => EnvelopeNorm::L2,
            NormName::L3 => EnvelopeNorm::L3,
        };
        let fit = profile.fit(norm)?;
        let text = to_json(&json!({ "norm": norm, "fit": fit, "profile": profile }))?;
        let mut out = Output::new("envelope", text.clone()).file("envelope_profile.json", text);
        out.config = config;
        return Ok(out);
    }
    if a.delta.is_empty() {
        return Err(bad_arg("--delta is required unless --growth is given"));
    }
    if a.x.is_empty() {
        if a.points == 0 {
            return Err(bad_arg("--points must be positive"));
        }
        let xs: Vec<f64> = (0..a.points).map(|j| (j as f64 + 0.5) / a.points as f64).collect();
        let csv = envelope_band(&class, &center, &a.delta, &xs, method)?.to_csv()?;
        let mut out = Output::new("envelope", csv.clone()).file("envelope_band.csv", csv);
        out.config = config;
        return Ok(out);
    }
    let mut values = Vec::new();
    for &d in &a.delta {
        for &x in &a.x {
            values.push((d, x, envelope_value(&class, &center, d, x, method)?));
        }
    }
    let mut t = Table::new(&["delta", "x", "envelope"]);
    for &(d, x, v) in &values {
        t.push_reals(&[d, x, v]);
    }
    let csv = t.to_csv()?;
    let stdout = if values.len() == 1 { format!("{}\n", values[0].2) } else { csv.clone() };
    let mut out = Output::new("envelope", stdout).file("envelope.csv", csv);
    out.config = config;
    Ok(out)
}
