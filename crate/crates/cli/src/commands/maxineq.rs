use std::path::PathBuf;

use clap::ValueEnum;
use heavyls::maxineq::{random_configs, sqrt_log_growth, verify_b1, EntryLaw, MaxIneqConfig};
use serde_json::json;

use super::{to_json, Output};
use crate::csvio::{real, Table};
use crate::error::{bad_arg, CliResult};
use crate::manifest::{apply_overrides, load_config};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawName {
    Gaussian,
    Rademacher,
    SymPareto,
}

#[derive(Debug, clap::Args)]
pub struct MaxIneqArgs {
    /// Config JSON with n, p, q, law, scale and seed.
    #[arg(long, conflicts_with_all = ["random", "growth"])]
    pub config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE", requires = "config")]
    pub sets: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub p: usize,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub law: LawName,
    /// Tail index of sym_pareto entries.
    #[arg(long, default_value_t = 2.5)]
    pub q_index: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Check this many seeded random configurations instead of one.
    #[arg(long)]
    pub random: Option<usize>,
    /// Run the √log N growth regression instead.
    #[arg(long)]
    pub growth: bool,
}

fn configs(a: &MaxIneqArgs) -> CliResult<Vec<MaxIneqConfig>> {
    if let Some(path) = &a.config {
        let mut raw = load_config(path)?;
        apply_overrides(&mut raw, &a.sets)?;
        let cfg = serde_json::from_value(raw).map_err(|e| bad_arg(format!("{}: {e}", path.display())))?;
        return Ok(vec![cfg]);
    }
    if let Some(count) = a.random {
        return Ok(random_configs(count, a.seed));
    }
    let law = match a.law {
        LawName::Gaussian => EntryLaw::Gaussian,
        LawName::Rademacher => EntryLaw::Rademacher,
        LawName::SymPareto => EntryLaw::SymPareto { q_index: a.q_index },
    };
    Ok(vec![MaxIneqConfig { n: a.n, p: a.p, q: a.q, law, scale: a.scale, seed: a.seed }])
}

pub fn run(a: &MaxIneqArgs) -> CliResult<Output> {
    if a.growth {
        let g = sqrt_log_growth(a.n, a.reps, 10, a.seed)?;
        let mut t = Table::new(&["count", "sqrt_log_count", "mean_max"]);
        for (c, m) in g.counts.iter().zip(&g.means) {
            t.push(vec![c.to_string(), real((*c as f64).ln().sqrt()), real(*m)]);
        }
        let text = to_json(&g)?;
        let mut out = Output::new("maxineq", text.clone()).file("growth.json", text).file("growth.csv", t.to_csv()?);
        out.config = json!({ "growth": true, "n": a.n, "reps": a.reps });
        out.seeds = vec![a.seed];
        return Ok(out);
    }
    let cfgs = configs(a)?;
    let mut t = Table::new(&["n", "p", "q", "law", "scale", "seed", "mc_estimate", "mc_se", "bound", "slack", "alternative"]);
    for cfg in &cfgs {
        let c = verify_b1(cfg, a.reps)?;
        t.push(vec![
            cfg.n.to_string(),
            cfg.p.to_string(),
            real(cfg.q),
            cfg.law.label(),
            real(cfg.scale),
            cfg.seed.to_string(),
            real(c.mc_estimate),
            real(c.mc_se),
            real(c.bound),
            real(c.slack),
            real(c.alternative),
        ]);
    }
    let csv = t.to_csv()?;
    let mut out = Output::new("maxineq", csv.clone()).file("maxineq.csv", csv);
    out.config = json!({ "configs": cfgs, "reps": a.reps });
    out.seeds = cfgs.iter().map(|c| c.seed).collect();
    Ok(out)
}
