use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{misspecified_target, predicted_rate, ErrorNorm, ExperimentSpec};
use crate::error::{Error, Result};
use crate::fitted::FittedFn;
use crate::noise::draw_errors_with;
use crate::norms::{empirical_l2_distance, population_l2_distance};
use crate::rates::RatePrediction;
use crate::rng::{cell_stream, stream_rng};
use crate::sample::Sample;
use crate::solvers::{fit_class_with, SolverOptions, Status};
use crate::stats::{median, ols, sample_sd};
use crate::truth::Evaluable;

/// Fraction of non-converged fits above which an experiment is degraded.
pub const DEGRADED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: usize,
    pub rep: usize,
    /// NaN when the fit failed outright.
    pub error: f64,
    pub converged: bool,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub reps: usize,
    pub nonconverged: usize,
    pub mean: f64,
    pub median: f64,
    pub q90: f64,
    /// Monte Carlo standard error of the mean.
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub se_hc1: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellSummary>,
    /// None when the noise is identically zero or too few cells are available.
    pub exponent: Option<ExponentFit>,
    pub prediction: Option<RatePrediction>,
    pub degraded: bool,
    pub warnings: Vec<String>,
    pub records: Vec<RepRecord>,
}

impl RateReport {
    pub fn nonconverged(&self) -> usize {
        self.cells.iter().map(|c| c.nonconverged).sum()
    }
}

pub(super) enum Target {
    Truth,
    Projection(FittedFn),
}

impl Target {
    pub(super) fn new(spec: &ExperimentSpec, n: usize) -> Result<Self> {
        if spec.misspecified {
            Ok(Target::Projection(misspecified_target(&spec.class_at(n)?, &spec.f0, spec.target_grid)?))
        } else {
            Ok(Target::Truth)
        }
    }

    pub(super) fn as_eval<'a>(&'a self, spec: &'a ExperimentSpec) -> &'a dyn Evaluable {
        match self {
            Target::Truth => &spec.f0,
            Target::Projection(f) => f,
        }
    }
}

/// One replication: fit at sample size n and measure the L2 error against the target.
pub(super) fn replicate(spec: &ExperimentSpec, target: &dyn Evaluable, n_idx: usize, rep: usize) -> RepRecord {
    let n = spec.n_grid[n_idx];
    let failed = RepRecord { n, rep, error: f64::NAN, converged: false, kkt_residual: f64::NAN };
    let mut rng = stream_rng(spec.master_seed, cell_stream(n_idx, rep));
    let design = spec.design.with_npoints(n);
    let x = design.draw(&mut rng);
    let eps = draw_errors_with(&spec.noise, &x, &mut rng);
    let y: Vec<f64> = x.iter().zip(&eps).map(|(&xi, e)| spec.f0.eval(xi) + e).collect();
    let Ok(class) = spec.class_at(n) else { return failed };
    let Ok(sample) = Sample::new(x, y) else { return failed };
    let Ok((fit, report)) = fit_class_with(&sample, &class, &SolverOptions::default()) else { return failed };
    let error = match spec.norm {
        ErrorNorm::Population => population_l2_distance(&fit, target, &design),
        ErrorNorm::Empirical => {
            let holdout = design.with_npoints(4 * n).draw(&mut rng);
            empirical_l2_distance(&fit, target, &holdout)
        }
    };
    match error {
        Ok(error) => RepRecord {
            n,
            rep,
            error,
            converged: report.status == Status::Converged,
            kkt_residual: report.kkt_residual,
        },
        Err(_) => failed,
    }
}

/// Runs every (n, rep) cell in parallel; the result order is (n, rep) regardless of scheduling.
pub(super) fn run_cells(spec: &ExperimentSpec) -> Result<Vec<RepRecord>> {
    let targets = spec.n_grid.iter().map(|&n| Target::new(spec, n)).collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> =
        (0..spec.n_grid.len()).flat_map(|i| (0..spec.reps).map(move |r| (i, r))).collect();
    Ok(cells
        .into_par_iter()
        .map(|(i, r)| replicate(spec, targets[i].as_eval(spec), i, r))
        .collect())
}

pub(super) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(n: usize, records: &[RepRecord]) -> CellSummary {
    let nonconverged = records.iter().filter(|r| !r.converged).count();
    let mut errs: Vec<f64> = records.iter().filter(|r| r.error.is_finite()).map(|r| r.error).collect();
    errs.sort_by(f64::total_cmp);
    let k = errs.len();
    let (mean, med, q90, mc_se) = if k == 0 {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean = errs.iter().sum::<f64>() / k as f64;
        let se = if k > 1 { sample_sd(&errs) / (k as f64).sqrt() } else { f64::NAN };
        (mean, median(&errs), quantile(&errs, 0.9), se)
    };
    CellSummary { n, reps: records.len(), nonconverged, mean, median: med, q90, mc_se }
}

/// Regression of log median error on log n with HC1 standard errors and a t interval.
pub fn fit_exponent(ns: &[usize], medians: &[f64]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(medians)
        .filter(|(_, m)| m.is_finite() && **m > 0.0)
        .map(|(&n, &m)| ((n as f64).ln(), m.ln()))
        .collect();
    let k = pts.len();
    if k < 3 {
        return Err(Error::Fit(format!("need at least 3 positive medians for an exponent fit, got {k}")));
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let fit = ols(&[vec![1.0; k], lx], &ly)?;
    let se = fit.hc1_se(1);
    let t = StudentsT::new(0.0, 1.0, (k - 2) as f64)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    let slope = fit.coef[1];
    Ok(ExponentFit { slope, intercept: fit.coef[0], se_hc1: se, ci_lo: slope - t * se, ci_hi: slope + t * se, r2: fit.r2 })
}

pub fn run_rate_experiment(spec: &ExperimentSpec) -> Result<RateReport> {
    spec.validate()?;
    let records = run_cells(spec)?;
    let cells: Vec<CellSummary> = records.chunks(spec.reps).zip(&spec.n_grid).map(|(c, &n)| summarize(n, c)).collect();
    let mut warnings = Vec::new();
    let total_bad: usize = cells.iter().map(|c| c.nonconverged).sum();
    let degraded = total_bad as f64 > DEGRADED_FRACTION * records.len() as f64;
    if degraded {
        warnings.push(format!("{total_bad} of {} fits did not converge", records.len()));
    }
    let exponent = if spec.is_noiseless() {
        warnings.push("noise is identically zero; exponent fit skipped".into());
        None
    } else {
        let ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
        let meds: Vec<f64> = cells.iter().map(|c| c.median).collect();
        match fit_exponent(&ns, &meds) {
            Ok(f) => Some(f),
            Err(e) => {
                warnings.push(format!("exponent fit skipped: {e}"));
                None
            }
        }
    };
    Ok(RateReport { spec: spec.clone(), cells, exponent, prediction: predicted_rate(spec), degraded, warnings, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::ShapeClass;
    use crate::noise::{NoiseLaw, NoiseSpec};
    use crate::truth::Truth;

    fn iso_spec(reps: usize) -> ExperimentSpec {
        let noise = NoiseSpec::constant(NoiseLaw::Gaussian, 1.0, 0).unwrap();
        ExperimentSpec::new(ShapeClass::monotone(), Truth::Identity, noise, vec![64, 128, 256, 512], reps, 11)
    }

    #[test]
    fn deterministic_under_rescheduling() {
        let spec = iso_spec(20);
        let a = run_rate_experiment(&spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_rate_experiment(&spec).unwrap());
        assert_eq!(a, b);
        let order: Vec<(usize, usize)> = a.records.iter().map(|r| (r.n, r.rep)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn isotonic_identity_rate_is_near_one_third() {
        let rep = run_rate_experiment(&iso_spec(60)).unwrap();
        assert!(!rep.degraded);
        let e = rep.exponent.unwrap();
        assert!(e.slope > -0.5 && e.slope < -0.2, "{e:?}");
        assert!((rep.prediction.unwrap().exponent - 1.0 / 3.0).abs() < 1e-12);
        // Scaled medians stay within a factor of four.
        let scaled: Vec<f64> = rep.cells.iter().map(|c| c.median * (c.n as f64).powf(1.0 / 3.0)).collect();
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi / lo < 4.0);
    }

    #[test]
    fn zero_noise_skips_the_exponent() {
        let mut spec = iso_spec(3);
        spec.noise = NoiseSpec::constant(NoiseLaw::Gaussian, 0.0, 0).unwrap();
        let rep = run_rate_experiment(&spec).unwrap();
        assert!(rep.exponent.is_none());
        assert!(rep.warnings.iter().any(|w| w.contains("zero")));
    }

    #[test]
    fn empirical_norm_is_close_to_population() {
        let mut spec = iso_spec(10);
        let pop = run_rate_experiment(&spec).unwrap();
        spec.norm = ErrorNorm::Empirical;
        let emp = run_rate_experiment(&spec).unwrap();
        for (a, b) in pop.cells.iter().zip(&emp.cells) {
            assert!((a.median / b.median - 1.0).abs() < 0.3);
        }
    }

    #[test]
    fn exponent_of_an_exact_power_law() {
        let ns = [100, 200, 400, 800];
        let meds: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-0.4)).collect();
        let f = fit_exponent(&ns, &meds).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-12);
        assert!(f.ci_hi - f.ci_lo < 1e-9);
    }
}
