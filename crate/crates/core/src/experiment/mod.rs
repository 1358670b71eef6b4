//! Monte Carlo rate and tail experiments for the shape-constrained LSE.

mod misspec;
mod rate;
mod tail;

pub use misspec::misspecified_target;
pub use rate::{fit_exponent, run_rate_experiment, CellSummary, ExponentFit, RateReport, RepRecord, DEGRADED_FRACTION};
pub use tail::{
    default_hill_k, hill_self_test, run_tail_experiment, survival_slope, SurvivalPoint, TailOptions, TailReport, TailSide,
};

use serde::{Deserialize, Serialize};

use crate::class::{ClassKind, ShapeClass};
use crate::design::Design;
use crate::error::{arg, Result};
use crate::noise::{NoiseLaw, NoiseSpec};
use crate::rates::{predict, predict_bracketing, predict_supnorm, predict_vc, RatePrediction, RegimeInput};
use crate::truth::Truth;

pub const DEFAULT_MAX_FITS: usize = 2_000_000;
pub const DEFAULT_TARGET_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    /// Exact L2 distance under the design measure.
    #[default]
    Population,
    /// Root mean square over a fresh holdout of 4n design points.
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub class: ShapeClass,
    /// When set, the class bound at sample size n is this multiple of √log n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_sqrt_log: Option<f64>,
    pub f0: Truth,
    pub design: Design,
    pub noise: NoiseSpec,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    #[serde(default)]
    pub norm: ErrorNorm,
    #[serde(default)]
    pub misspecified: bool,
    #[serde(default = "default_target_grid")]
    pub target_grid: usize,
    pub master_seed: u64,
    /// Overrides the regime used for the predicted exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeInput>,
    #[serde(default = "default_max_fits")]
    pub max_fits: usize,
}

fn default_target_grid() -> usize {
    DEFAULT_TARGET_GRID
}

fn default_max_fits() -> usize {
    DEFAULT_MAX_FITS
}

impl ExperimentSpec {
    pub fn new(class: ShapeClass, f0: Truth, noise: NoiseSpec, n_grid: Vec<usize>, reps: usize, master_seed: u64) -> Self {
        Self {
            class,
            phi_sqrt_log: None,
            f0,
            design: Design::uniform(n_grid.first().copied().unwrap_or(1), master_seed),
            noise,
            n_grid,
            reps,
            norm: ErrorNorm::Population,
            misspecified: false,
            target_grid: DEFAULT_TARGET_GRID,
            master_seed,
            regime: None,
            max_fits: DEFAULT_MAX_FITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.n_grid.is_empty() {
            return Err(arg("n_grid must not be empty"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(arg("n_grid must be strictly increasing"));
        }
        let min_n = if matches!(self.class.kind, ClassKind::Convex) { 3 } else { 2 };
        if self.n_grid[0] < min_n {
            return Err(arg(format!("every n must be at least {min_n} for the {} class", self.class.name())));
        }
        if self.reps == 0 {
            return Err(arg("reps must be positive"));
        }
        let fits = self.n_grid.len().saturating_mul(self.reps);
        if fits > self.max_fits {
            return Err(arg(format!("{fits} fits exceed the budget of {}", self.max_fits)));
        }
        if let Some(c) = self.phi_sqrt_log {
            if !(c > 0.0) || !c.is_finite() {
                return Err(arg(format!("phi_sqrt_log must be positive, got {c}")));
            }
        }
        if self.misspecified && self.target_grid < 3 {
            return Err(arg("target_grid must be at least 3"));
        }
        Ok(())
    }

    /// The class used at sample size n.
    pub fn class_at(&self, n: usize) -> Result<ShapeClass> {
        match self.phi_sqrt_log {
            Some(c) => self.class.bounded(c * (n as f64).ln().max(1.0).sqrt()),
            None => Ok(self.class),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise.sigma_fn.sup() == 0.0
    }
}

/// Supremum of the finite absolute-moment orders of the law.
pub fn moment_order(law: &NoiseLaw) -> f64 {
    match *law {
        NoiseLaw::Gaussian => f64::INFINITY,
        NoiseLaw::StudentT { df } => df,
        NoiseLaw::SymPareto { q_index } => q_index,
        NoiseLaw::TwoMomentLog => 2.0,
    }
}

/// Predicted exponent for an experiment: the spec override if present, otherwise the best
/// guarantee among the regimes that apply to the class and centre.
pub fn predicted_rate(spec: &ExperimentSpec) -> Option<RatePrediction> {
    if let Some(r) = &spec.regime {
        return predict(r).ok();
    }
    let q = moment_order(&spec.noise.law).max(2.0);
    let constant = matches!(spec.f0, Truth::Zero | Truth::Constant { .. });
    let linear = constant || matches!(spec.f0, Truth::Linear { .. } | Truth::Identity);
    let candidates: Vec<Result<RatePrediction>> = match spec.class.kind {
        ClassKind::Monotone if constant => vec![predict_vc(0.0, 1.0, 1.0)],
        ClassKind::Monotone => vec![predict_bracketing(1.0, 0.0, q)],
        ClassKind::Convex if linear && !spec.misspecified => vec![predict_vc(0.0, 1.0, 1.0)],
        ClassKind::Convex => vec![predict_bracketing(0.5, 2.0 / 3.0, q)],
        ClassKind::Holder { gamma, .. } => {
            let alpha = 1.0 / gamma;
            let s = 2.0 * gamma / (2.0 * gamma + 1.0);
            vec![predict_bracketing(alpha, s, q), predict_supnorm(alpha, s, q)]
        }
    };
    candidates
        .into_iter()
        .filter_map(|p| p.ok())
        .max_by(|a, b| a.exponent.total_cmp(&b.exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::SigmaFn;

    fn spec(class: ShapeClass, f0: Truth, law: NoiseLaw) -> ExperimentSpec {
        let noise = NoiseSpec::new(law, SigmaFn::Constant { sigma: 1.0 }, 0).unwrap();
        ExperimentSpec::new(class, f0, noise, vec![64, 128], 10, 1)
    }

    #[test]
    fn predictions_follow_the_class() {
        let p = predicted_rate(&spec(ShapeClass::monotone(), Truth::Zero, NoiseLaw::TwoMomentLog)).unwrap();
        assert_eq!(p.exponent, 0.5);
        let p = predicted_rate(&spec(ShapeClass::convex(), Truth::Square, NoiseLaw::SymPareto { q_index: 3.0 })).unwrap();
        assert!((p.exponent - 0.4).abs() < 1e-12);
        let lip = ShapeClass::holder(1.0, 2.0).unwrap();
        let p = predicted_rate(&spec(lip, Truth::Identity, NoiseLaw::SymPareto { q_index: 3.0 })).unwrap();
        assert!((p.exponent - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spec_json_rejects_unknown_keys() {
        let s = spec(ShapeClass::monotone(), Truth::Zero, NoiseLaw::Gaussian);
        let mut v = serde_json::to_value(&s).unwrap();
        let back: ExperimentSpec = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, s);
        v.as_object_mut().unwrap().insert("repz".into(), 3.into());
        let e = serde_json::from_value::<ExperimentSpec>(v).unwrap_err().to_string();
        assert!(e.contains("repz"), "{e}");
    }

    #[test]
    fn validation() {
        let mut s = spec(ShapeClass::monotone(), Truth::Zero, NoiseLaw::Gaussian);
        s.n_grid = vec![128, 64];
        assert!(s.validate().is_err());
        s.n_grid = vec![64, 128];
        s.max_fits = 5;
        assert!(s.validate().is_err());
    }
}
