//! Symmetric, possibly heavy-tailed and heteroscedastic error laws.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::gl16;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "NoiseLawRepr", into = "NoiseLawRepr")]
pub enum NoiseLaw {
    Gaussian,
    StudentT { df: f64 },
    SymPareto { q_index: f64 },
    /// P(|Z| ≥ t) = log²2 / (t² log²(1+t)) for t ≥ 1; finite variance, no higher moment.
    TwoMomentLog,
}

// Empty struct variants so that unknown keys are rejected for every law.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NoiseLawRepr {
    Gaussian {},
    StudentT { df: f64 },
    SymPareto { q_index: f64 },
    TwoMomentLog {},
}

impl From<NoiseLawRepr> for NoiseLaw {
    fn from(r: NoiseLawRepr) -> Self {
        match r {
            NoiseLawRepr::Gaussian {} => NoiseLaw::Gaussian,
            NoiseLawRepr::StudentT { df } => NoiseLaw::StudentT { df },
            NoiseLawRepr::SymPareto { q_index } => NoiseLaw::SymPareto { q_index },
            NoiseLawRepr::TwoMomentLog {} => NoiseLaw::TwoMomentLog,
        }
    }
}

impl From<NoiseLaw> for NoiseLawRepr {
    fn from(l: NoiseLaw) -> Self {
        match l {
            NoiseLaw::Gaussian => NoiseLawRepr::Gaussian {},
            NoiseLaw::StudentT { df } => NoiseLawRepr::StudentT { df },
            NoiseLaw::SymPareto { q_index } => NoiseLawRepr::SymPareto { q_index },
            NoiseLaw::TwoMomentLog => NoiseLawRepr::TwoMomentLog {},
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XdepName {
    /// σ_max (0.2 + 0.8 x)
    Linear,
    /// σ_max (0.2 + 0.8 sin²(2πx))
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaFn {
    Constant { sigma: f64 },
    Xdep { name: XdepName, sigma_max: f64 },
}

impl SigmaFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SigmaFn::Constant { sigma } => sigma,
            SigmaFn::Xdep { name: XdepName::Linear, sigma_max } => sigma_max * (0.2 + 0.8 * x),
            SigmaFn::Xdep { name: XdepName::Oscillating, sigma_max } => {
                let s = (2.0 * std::f64::consts::PI * x).sin();
                sigma_max * (0.2 + 0.8 * s * s)
            }
        }
    }

    /// sup over [0, 1] of σ(x).
    pub fn sup(&self) -> f64 {
        match *self {
            SigmaFn::Constant { sigma } => sigma,
            SigmaFn::Xdep { sigma_max, .. } => sigma_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub law: NoiseLaw,
    pub sigma_fn: SigmaFn,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(law: NoiseLaw, sigma_fn: SigmaFn, seed: u64) -> Result<Self> {
        let spec = Self { law, sigma_fn, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn constant(law: NoiseLaw, sigma: f64, seed: u64) -> Result<Self> {
        Self::new(law, SigmaFn::Constant { sigma }, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let scale = match self.sigma_fn {
            SigmaFn::Constant { sigma } => sigma,
            SigmaFn::Xdep { sigma_max, .. } => sigma_max,
        };
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("noise scale must be finite and nonnegative, got {scale}")));
        }
        match self.law {
            NoiseLaw::SymPareto { q_index } if !(q_index > 2.0) => Err(Error::Config(format!(
                "sym_pareto needs q_index > 2 for a finite variance, got {q_index}"
            ))),
            NoiseLaw::StudentT { df } if !(df > 0.0) => {
                Err(Error::Config(format!("student_t needs df > 0, got {df}")))
            }
            NoiseLaw::StudentT { df } if df <= 2.0 && !matches!(self.sigma_fn, SigmaFn::Constant { .. }) => {
                Err(Error::Config(format!(
                    "student_t with df = {df} has infinite variance and is allowed only with a constant scale"
                )))
            }
            _ => Ok(()),
        }
    }

    /// True when the conditional variance is infinite (student_t with df ≤ 2).
    pub fn violates_cvar(&self) -> bool {
        matches!(self.law, NoiseLaw::StudentT { df } if df <= 2.0)
    }

    pub fn label(&self) -> String {
        let law = match self.law {
            NoiseLaw::Gaussian => "gaussian".to_string(),
            NoiseLaw::StudentT { df } => format!("student_t({df})"),
            NoiseLaw::SymPareto { q_index } => format!("sym_pareto({q_index})"),
            NoiseLaw::TwoMomentLog => "two_moment_log".to_string(),
        };
        let sigma = match self.sigma_fn {
            SigmaFn::Constant { sigma } => format!("constant({sigma})"),
            SigmaFn::Xdep { name: XdepName::Linear, sigma_max } => format!("linear({sigma_max})"),
            SigmaFn::Xdep { name: XdepName::Oscillating, sigma_max } => format!("oscillating({sigma_max})"),
        };
        format!("{law}*{sigma}")
    }
}

pub const LN2: f64 = std::f64::consts::LN_2;

pub fn two_moment_survival(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else {
        let l = (1.0 + t).ln();
        LN2 * LN2 / (t * t * l * l)
    }
}

/// Largest t in [1, 1e18] with survival(t) ≥ u, by bisection in log t.
fn two_moment_quantile(u: f64) -> f64 {
    if u >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 18.0 * std::f64::consts::LN_10);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if two_moment_survival(mid.exp()) >= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

impl NoiseLaw {
    /// One draw of the standardized variable Z.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseLaw::Gaussian => rng.sample(StandardNormal),
            NoiseLaw::StudentT { df } => {
                let t: f64 = StudentT::new(df).expect("validated df").sample(rng);
                if df > 2.0 { t * ((df - 2.0) / df).sqrt() } else { t }
            }
            NoiseLaw::SymPareto { q_index } => {
                let u = 1.0 - rng.random::<f64>();
                let mag = u.powf(-1.0 / q_index) * ((q_index - 2.0) / q_index).sqrt();
                if rng.random::<bool>() { mag } else { -mag }
            }
            NoiseLaw::TwoMomentLog => {
                let u = 1.0 - rng.random::<f64>();
                let mag = two_moment_quantile(u);
                if rng.random::<bool>() { mag } else { -mag }
            }
        }
    }

    /// E|Z|^q for the standardized variable, or None if it is infinite.
    pub fn abs_moment(&self, q: f64) -> Option<f64> {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        match *self {
            NoiseLaw::Gaussian => Some(2f64.powf(q / 2.0) * gamma((q + 1.0) / 2.0) / sqrt_pi),
            NoiseLaw::StudentT { df } => {
                if q >= df {
                    return None;
                }
                let raw = df.powf(q / 2.0) * gamma((q + 1.0) / 2.0) * gamma((df - q) / 2.0)
                    / (sqrt_pi * gamma(df / 2.0));
                let scale = if df > 2.0 { ((df - 2.0) / df).powf(q / 2.0) } else { 1.0 };
                Some(raw * scale)
            }
            NoiseLaw::SymPareto { q_index } => {
                if q >= q_index {
                    return None;
                }
                Some(((q_index - 2.0) / q_index).powf(q / 2.0) * q_index / (q_index - q))
            }
            NoiseLaw::TwoMomentLog => {
                if q > 2.0 {
                    return None;
                }
                // 1 + ∫_0^∞ q e^{qu} S(e^u) du with u = s/(1-s)
                let tail = gl16().integrate_panels(0.0, 1.0, 64, |s| {
                    let u = s / (1.0 - s);
                    let l = (1.0 + u.exp()).ln();
                    q * LN2 * LN2 * ((q - 2.0) * u).exp() / (l * l) / ((1.0 - s) * (1.0 - s))
                });
                Some(1.0 + tail)
            }
        }
    }
}

/// ε_i = σ(x_i) Z_i using the spec's own seed.
pub fn draw_errors(spec: &NoiseSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, 0);
    Ok(draw_errors_with(spec, x, &mut rng))
}

pub fn draw_errors_with<R: Rng + ?Sized>(spec: &NoiseSpec, x: &[f64], rng: &mut R) -> Vec<f64> {
    x.iter().map(|&t| spec.sigma_fn.eval(t) * spec.law.sample(rng)).collect()
}

/// Mean of |ε_i|^q.
pub fn empirical_moment(errors: &[f64], q: f64) -> f64 {
    errors.iter().map(|e| e.abs().powf(q)).sum::<f64>() / errors.len() as f64
}
