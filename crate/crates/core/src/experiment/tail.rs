use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rate::run_cells;
use super::{predicted_rate, ExperimentSpec};
use crate::error::{arg, Error, Result};
use crate::noise::{NoiseLaw, NoiseSpec};
use crate::rng::stream_rng;
use crate::stats::{hill_estimator, linear_fit};

pub const MIN_TAIL_REPS: usize = 1000;
pub const MIN_EXCEEDANCES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailOptions {
    /// Survival thresholds; dyadic powers spanning the data when empty.
    pub thresholds: Vec<f64>,
    /// Hill order statistic count; max(20, 5% of reps) when unset.
    pub hill_k: Option<usize>,
    pub gaussian_twin: bool,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self { thresholds: Vec::new(), hill_k: None, gaussian_twin: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub threshold: f64,
    pub survival: f64,
    pub exceedances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSide {
    pub noise: String,
    pub scaled_errors: Vec<f64>,
    pub survival: Vec<SurvivalPoint>,
    /// Log-log slope of the empirical survival over the top decile.
    pub top_decile_slope: Option<f64>,
    pub hill_index: Option<f64>,
    pub hill_k: usize,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub reps: usize,
    /// Exponent e of the scaling r_n = n^e.
    pub rate_exponent: f64,
    pub main: TailSide,
    pub gaussian: Option<TailSide>,
    pub degraded: bool,
    pub warnings: Vec<String>,
}

pub fn default_hill_k(reps: usize) -> usize {
    MIN_EXCEEDANCES.max(reps / 20)
}

/// Powers of two from below the 10% quantile up to the sample maximum.
fn dyadic_thresholds(sorted_desc: &[f64]) -> Vec<f64> {
    let pos: Vec<f64> = sorted_desc.iter().copied().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return vec![1.0];
    }
    let lo = pos[(pos.len() * 9 / 10).min(pos.len() - 1)].log2().floor() as i32;
    let hi = pos[0].log2().ceil() as i32;
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

/// Slope of log survival against log threshold over the top decile, using order statistics
/// at exceedance counts spaced geometrically from 10% of the sample down to 20.
pub fn survival_slope(values: &[f64]) -> Result<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let total = v.len();
    let top = total / 10;
    if top < 2 * MIN_EXCEEDANCES {
        return Err(Error::Fit(format!("top decile of {total} values is too small for a survival slope")));
    }
    let steps = 8;
    let ratio = (MIN_EXCEEDANCES as f64 / top as f64).powf(1.0 / (steps - 1) as f64);
    let mut ks: Vec<usize> = (0..steps).map(|i| (top as f64 * ratio.powi(i)).round() as usize).collect();
    ks.dedup();
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for &k in &ks {
        let d = v[k - 1];
        if d > 0.0 {
            lx.push(d.ln());
            ly.push((k as f64 / total as f64).ln());
        }
    }
    if lx.len() < 3 || lx.iter().all(|x| *x == lx[0]) {
        return Err(Error::Fit("top-decile order statistics are degenerate".into()));
    }
    Ok(linear_fit(&lx, &ly)?.coef[1])
}

fn tail_side(spec: &ExperimentSpec, scale: f64, opts: &TailOptions, warnings: &mut Vec<String>) -> Result<TailSide> {
    let records = run_cells(spec)?;
    let nonconverged = records.iter().filter(|r| !r.converged).count();
    let scaled: Vec<f64> = records.iter().filter(|r| r.error.is_finite()).map(|r| scale * r.error).collect();
    let mut desc = scaled.clone();
    desc.sort_by(|a, b| b.total_cmp(a));
    let noise = spec.noise.label();
    let noiseless = spec.is_noiseless();
    let thresholds = if opts.thresholds.is_empty() { dyadic_thresholds(&desc) } else { opts.thresholds.clone() };
    let total = scaled.len().max(1) as f64;
    let mut survival = Vec::new();
    for d in thresholds {
        let exceedances = desc.iter().take_while(|v| **v >= d).count();
        if exceedances < MIN_EXCEEDANCES && !noiseless {
            warnings.push(format!("{noise}: threshold {d} has {exceedances} exceedances and was dropped"));
            continue;
        }
        survival.push(SurvivalPoint { threshold: d, survival: exceedances as f64 / total, exceedances });
    }
    let hill_k = opts.hill_k.unwrap_or_else(|| default_hill_k(spec.reps));
    let (top_decile_slope, hill_index) = if noiseless {
        (None, None)
    } else {
        (survival_slope(&scaled).ok(), hill_estimator(&scaled, hill_k).ok().filter(|h| *h > 0.0))
    };
    Ok(TailSide { noise, scaled_errors: scaled, survival, top_decile_slope, hill_index, hill_k, nonconverged })
}

/// Tail behaviour of r_n‖f̂ − f0‖ at a single sample size, with a gaussian-noise twin.
pub fn run_tail_experiment(spec: &ExperimentSpec, n: usize, opts: &TailOptions) -> Result<TailReport> {
    if spec.reps < MIN_TAIL_REPS {
        return Err(arg(format!("tail experiments need at least {MIN_TAIL_REPS} reps, got {}", spec.reps)));
    }
    if opts.thresholds.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(arg("tail thresholds must be positive and finite"));
    }
    let mut single = spec.clone();
    single.n_grid = vec![n];
    single.validate()?;
    let rate_exponent = predicted_rate(&single).map(|p| p.exponent).unwrap_or(0.5);
    let scale = (n as f64).powf(rate_exponent);
    let mut warnings = Vec::new();
    let main = tail_side(&single, scale, opts, &mut warnings)?;
    let gaussian = if opts.gaussian_twin {
        let mut twin = single.clone();
        twin.noise = NoiseSpec::new(NoiseLaw::Gaussian, single.noise.sigma_fn, single.noise.seed)?;
        twin.master_seed = single.master_seed.wrapping_add(1);
        let twin_opts = TailOptions { thresholds: Vec::new(), ..opts.clone() };
        Some(tail_side(&twin, scale, &twin_opts, &mut warnings)?)
    } else {
        None
    };
    let bad = main.nonconverged + gaussian.as_ref().map_or(0, |g| g.nonconverged);
    let fits = spec.reps * if gaussian.is_some() { 2 } else { 1 };
    let degraded = bad as f64 > super::rate::DEGRADED_FRACTION * fits as f64;
    if degraded {
        warnings.push(format!("{bad} of {fits} fits did not converge"));
    }
    Ok(TailReport { n, reps: spec.reps, rate_exponent, main, gaussian, degraded, warnings })
}

/// Hill index of `draws` exact Pareto(index) samples with k = 5% of the draws.
pub fn hill_self_test(index: f64, draws: usize, seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 0);
    let v: Vec<f64> = (0..draws).map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / index)).collect();
    hill_estimator(&v, draws / 20)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::ShapeClass;
    use crate::truth::Truth;

    #[test]
    fn hill_recovers_pareto_three() {
        let h = hill_self_test(3.0, 100_000, 42).unwrap();
        assert!((2.8..=3.2).contains(&h), "{h}");
    }

    #[test]
    fn survival_slope_of_pareto() {
        let mut rng = stream_rng(9, 1);
        let v: Vec<f64> = (0..20_000).map(|_| (1.0 - rng.random::<f64>()).powf(-0.5)).collect();
        let s = survival_slope(&v).unwrap();
        assert!((s + 2.0).abs() < 0.3, "{s}");
    }

    #[test]
    fn noiseless_run_has_zero_survival() {
        let noise = NoiseSpec::constant(NoiseLaw::Gaussian, 0.0, 0).unwrap();
        let spec = ExperimentSpec::new(ShapeClass::monotone(), Truth::Zero, noise, vec![64], 1000, 3);
        let opts = TailOptions { thresholds: vec![0.5, 1.0], hill_k: None, gaussian_twin: false };
        let rep = run_tail_experiment(&spec, 64, &opts).unwrap();
        assert!(rep.main.scaled_errors.iter().all(|e| e.abs() < 1e-9));
        assert!(rep.main.survival.iter().all(|p| p.survival == 0.0));
        assert_eq!(rep.main.survival.len(), 2);
    }

    #[test]
    fn too_few_reps_rejected() {
        let noise = NoiseSpec::constant(NoiseLaw::Gaussian, 1.0, 0).unwrap();
        let spec = ExperimentSpec::new(ShapeClass::monotone(), Truth::Zero, noise, vec![64], 999, 3);
        assert!(run_tail_experiment(&spec, 64, &TailOptions::default()).is_err());
    }

    #[test]
    fn survival_is_nonincreasing() {
        let noise = NoiseSpec::constant(NoiseLaw::StudentT { df: 2.5 }, 1.0, 0).unwrap();
        let spec = ExperimentSpec::new(ShapeClass::monotone(), Truth::Zero, noise, vec![128], 1000, 4);
        let rep = run_tail_experiment(&spec, 128, &TailOptions::default()).unwrap();
        for side in std::iter::once(&rep.main).chain(rep.gaussian.as_ref()) {
            assert!(side.survival.windows(2).all(|w| w[1].survival <= w[0].survival));
            assert!(side.hill_index.unwrap() > 0.0);
        }
    }
}
