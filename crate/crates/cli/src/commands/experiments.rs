use std::path::PathBuf;

use heavyls::experiment::{run_rate_experiment, run_tail_experiment, ExperimentSpec, TailOptions};
use serde_json::{json, Value};

use super::{to_json, Output};
use crate::csvio::{real, Table};
use crate::error::{bad_arg, CliResult};
use crate::figures::{cells_table, rate_loglog, tail_survival};
use crate::manifest::{apply_overrides, load_config};

#[derive(Debug, Clone, clap::Args)]
pub struct SpecArgs {
    /// Experiment JSON (or a manifest from an earlier run).
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config entry, e.g. `--set reps=100` or `--set noise.sigma_fn.sigma=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

impl SpecArgs {
    fn load(&self) -> CliResult<(ExperimentSpec, Value)> {
        let mut raw = load_config(&self.config)?;
        apply_overrides(&mut raw, &self.sets)?;
        let spec: ExperimentSpec =
            serde_json::from_value(raw).map_err(|e| bad_arg(format!("{}: {e}", self.config.display())))?;
        spec.validate()?;
        let resolved = serde_json::to_value(&spec)?;
        Ok((spec, resolved))
    }
}

#[derive(Debug, clap::Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
}

#[derive(Debug, clap::Args)]
pub struct TailsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Sample size; defaults to the last entry of n_grid.
    #[arg(long)]
    pub n: Option<usize>,
    /// Survival thresholds, comma-separated; powers of two spanning the data when omitted.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<f64>,
    /// Number of order statistics for the Hill estimator.
    #[arg(long)]
    pub hill_k: Option<usize>,
    /// Skip the gaussian-noise twin.
    #[arg(long)]
    pub no_twin: bool,
}

pub fn run_rates(a: &RatesArgs) -> CliResult<Output> {
    let (spec, resolved) = a.spec.load()?;
    let report = run_rate_experiment(&spec)?;
    let summary = json!({
        "spec": report.spec,
        "cells": report.cells,
        "exponent": report.exponent,
        "prediction": report.prediction,
        "degraded": report.degraded,
        "warnings": report.warnings,
    });
    let text = to_json(&summary)?;
    let mut records = Table::new(&["n", "rep", "error", "converged", "kkt_residual"]);
    for r in &report.records {
        records.push(vec![r.n.to_string(), r.rep.to_string(), real(r.error), r.converged.to_string(), real(r.kkt_residual)]);
    }
    let mut out = Output::new("rates", text.clone())
        .file("rates.json", text)
        .file("rates_cells.csv", cells_table(&report).to_csv()?)
        .file("rate_loglog.csv", rate_loglog(&report).to_csv()?)
        .file("records.csv", records.to_csv()?);
    out.config = resolved;
    out.seeds = vec![spec.master_seed, spec.noise.seed, spec.design.seed];
    out.warnings = report.warnings.clone();
    out.degraded = report.degraded;
    Ok(out)
}

pub fn run_tails(a: &TailsArgs) -> CliResult<Output> {
    let (spec, mut resolved) = a.spec.load()?;
    let n = a.n.unwrap_or(*spec.n_grid.last().expect("validated spec has an n_grid"));
    let opts = TailOptions { thresholds: a.thresholds.clone(), hill_k: a.hill_k, gaussian_twin: !a.no_twin };
    let report = run_tail_experiment(&spec, n, &opts)?;
    let side_summary = |s: &heavyls::experiment::TailSide| {
        json!({
            "noise": s.noise,
            "survival": s.survival,
            "top_decile_slope": s.top_decile_slope,
            "hill_index": s.hill_index,
            "hill_k": s.hill_k,
            "nonconverged": s.nonconverged,
        })
    };
    let summary = json!({
        "n": report.n,
        "reps": report.reps,
        "rate_exponent": report.rate_exponent,
        "main": side_summary(&report.main),
        "gaussian": report.gaussian.as_ref().map(side_summary),
        "degraded": report.degraded,
        "warnings": report.warnings,
    });
    let text = to_json(&summary)?;
    let mut scaled = Table::new(&["rep", "scaled_error", "gaussian_scaled_error"]);
    for (i, v) in report.main.scaled_errors.iter().enumerate() {
        let twin = report.gaussian.as_ref().and_then(|g| g.scaled_errors.get(i)).map(|v| real(*v)).unwrap_or_default();
        scaled.push(vec![i.to_string(), real(*v), twin]);
    }
    let mut out = Output::new("tails", text.clone())
        .file("tails.json", text)
        .file("tail_survival.csv", tail_survival(&report.main).to_csv()?)
        .file("scaled_errors.csv", scaled.to_csv()?);
    if let Some(g) = &report.gaussian {
        out = out.file("tail_survival_gaussian.csv", tail_survival(g).to_csv()?);
    }
    resolved["tail"] = json!({ "n": n, "thresholds": a.thresholds, "hill_k": a.hill_k, "gaussian_twin": !a.no_twin });
    out.config = resolved;
    out.seeds = vec![spec.master_seed, spec.noise.seed, spec.design.seed];
    out.warnings = report.warnings.clone();
    out.degraded = report.degraded;
    Ok(out)
}
