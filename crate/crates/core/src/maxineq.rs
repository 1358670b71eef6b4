//! A finite-maximum inequality for sums of independent mean-zero vectors, with Monte Carlo
//! verification and the √log N growth check.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{arg, Error, Result};
use crate::noise::NoiseLaw;
use crate::quad::gl16;
use crate::rng::stream_rng;
use crate::stats::{linear_fit, mean, sample_sd};

pub const MIN_REPS: usize = 1000;

/// Law of every entry X_{i,j}; all laws are symmetric and have unit variance at scale 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "EntryLawRepr", into = "EntryLawRepr")]
pub enum EntryLaw {
    Gaussian,
    Rademacher,
    SymPareto { q_index: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
enum EntryLawRepr {
    Gaussian {},
    Rademacher {},
    SymPareto { q_index: f64 },
}

impl From<EntryLawRepr> for EntryLaw {
    fn from(r: EntryLawRepr) -> Self {
        match r {
            EntryLawRepr::Gaussian {} => EntryLaw::Gaussian,
            EntryLawRepr::Rademacher {} => EntryLaw::Rademacher,
            EntryLawRepr::SymPareto { q_index } => EntryLaw::SymPareto { q_index },
        }
    }
}

impl From<EntryLaw> for EntryLawRepr {
    fn from(l: EntryLaw) -> Self {
        match l {
            EntryLaw::Gaussian => EntryLawRepr::Gaussian {},
            EntryLaw::Rademacher => EntryLawRepr::Rademacher {},
            EntryLaw::SymPareto { q_index } => EntryLawRepr::SymPareto { q_index },
        }
    }
}

impl EntryLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            EntryLaw::Gaussian => NoiseLaw::Gaussian.sample(rng),
            EntryLaw::Rademacher => {
                if rng.random::<bool>() { 1.0 } else { -1.0 }
            }
            EntryLaw::SymPareto { q_index } => NoiseLaw::SymPareto { q_index }.sample(rng),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EntryLaw::Gaussian => "gaussian".into(),
            EntryLaw::Rademacher => "rademacher".into(),
            EntryLaw::SymPareto { q_index } => format!("sym_pareto({q_index})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxIneqConfig {
    pub n: usize,
    pub p: usize,
    pub q: f64,
    pub law: EntryLaw,
    #[serde(default = "one")]
    pub scale: f64,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

impl MaxIneqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(arg("n and p must be positive"));
        }
        if !(self.q >= 2.0) || !self.q.is_finite() {
            return Err(arg(format!("moment order q must be finite and at least 2, got {}", self.q)));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(arg(format!("scale must be positive, got {}", self.scale)));
        }
        if let EntryLaw::SymPareto { q_index } = self.law {
            if !(q_index > 2.0) {
                return Err(arg(format!("sym_pareto needs q_index > 2, got {q_index}")));
            }
            if self.q >= q_index {
                return Err(arg(format!("E[ξ^{}] is infinite for sym_pareto({q_index})", self.q)));
            }
        }
        Ok(())
    }

    /// V_{n,p}: the largest column sum of second moments.
    pub fn variance_sum(&self) -> f64 {
        self.n as f64 * self.scale * self.scale
    }

    /// Σ_i E[ξ_i^q] with ξ_i the largest absolute entry of row i.
    pub fn sum_xi_q(&self) -> f64 {
        self.n as f64 * max_abs_moment(self.law, self.scale, self.p, self.q)
    }
}

/// E[max of `count` i.i.d. |X|^q] for X = scale·Z.
pub fn max_abs_moment(law: EntryLaw, scale: f64, count: usize, q: f64) -> f64 {
    let m = count as f64;
    let unit = match law {
        EntryLaw::Rademacher => 1.0,
        EntryLaw::SymPareto { q_index: a } => {
            // |Z| = c·U^{-1/a}, so the maximum is c·M^{-1/a} with M ~ Beta(1, count).
            let c = ((a - 2.0) / a).sqrt();
            let r = q / a;
            c.powf(q) * (m.ln() + ln_gamma(1.0 - r) + ln_gamma(m) - ln_gamma(m + 1.0 - r)).exp()
        }
        EntryLaw::Gaussian => gl16().integrate_panels(0.0, 12.0, 240, |t| {
            let tail = erfc(t / std::f64::consts::SQRT_2);
            let surv = -(m * (-tail).ln_1p()).exp_m1();
            q * t.powf(q - 1.0) * surv
        }),
    };
    unit * scale.powf(q)
}

/// √(6V log(1+p)) + √2 (3 log(1+p))^{1−1/q} (2 Σ E[ξ_i^q])^{1/q}.
pub fn bound_b1(v: f64, logp1: f64, q: f64, sum_xi_q: f64) -> Result<f64> {
    if v < 0.0 || logp1 < 0.0 || sum_xi_q < 0.0 {
        return Err(arg("bound inputs must be nonnegative"));
    }
    if !(q >= 2.0) {
        return Err(arg(format!("q must be at least 2, got {q}")));
    }
    let gauss = (6.0 * v * logp1).sqrt();
    let tail = 2f64.sqrt() * (3.0 * logp1).powf(1.0 - 1.0 / q) * (2.0 * sum_xi_q).powf(1.0 / q);
    Ok(gauss + tail)
}

/// The older form √(V log(1+p)) + log(1+p) √(E[max_{i,j} X_{i,j}^2]), with unit constants.
pub fn alternative_bound(config: &MaxIneqConfig) -> f64 {
    let l = ((1 + config.p) as f64).ln();
    let max_sq = max_abs_moment(config.law, config.scale, config.n * config.p, 2.0);
    (config.variance_sum() * l).sqrt() + l * max_sq.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B1Check {
    pub config: MaxIneqConfig,
    pub reps: usize,
    pub mc_estimate: f64,
    pub mc_se: f64,
    pub bound: f64,
    pub slack: f64,
    pub alternative: f64,
}

fn max_abs_column_sum(config: &MaxIneqConfig, rep: usize, sums: &mut [f64]) -> f64 {
    let mut rng = stream_rng(config.seed, rep as u64);
    sums.iter_mut().for_each(|s| *s = 0.0);
    for _ in 0..config.n {
        for s in sums.iter_mut() {
            *s += config.law.sample(&mut rng);
        }
    }
    config.scale * sums.iter().fold(0.0f64, |m, s| m.max(s.abs()))
}

/// Monte Carlo estimate of E[max_j |Σ_i X_{i,j}|] against the bound with exact moments.
/// A negative slack is a hard error.
pub fn verify_b1(config: &MaxIneqConfig, reps: usize) -> Result<B1Check> {
    config.validate()?;
    if reps < MIN_REPS {
        return Err(arg(format!("verification needs at least {MIN_REPS} reps, got {reps}")));
    }
    let draws: Vec<f64> = (0..reps)
        .into_par_iter()
        .map_init(|| vec![0.0; config.p], |sums, r| max_abs_column_sum(config, r, sums))
        .collect();
    let mc_estimate = mean(&draws);
    let mc_se = sample_sd(&draws) / (reps as f64).sqrt();
    let logp1 = ((1 + config.p) as f64).ln();
    let bound = bound_b1(config.variance_sum(), logp1, config.q, config.sum_xi_q())?;
    let check = B1Check {
        config: config.clone(),
        reps,
        mc_estimate,
        mc_se,
        bound,
        slack: bound - mc_estimate,
        alternative: alternative_bound(config),
    };
    if check.slack < 0.0 {
        return Err(Error::Invariant(format!(
            "maximal inequality violated for {:?}: estimate {mc_estimate} exceeds bound {bound}",
            config
        )));
    }
    Ok(check)
}

/// Seeded random configurations: n ≤ 200, p ≤ 64, gaussian or sym_pareto(2.5) entries.
pub fn random_configs(count: usize, seed: u64) -> Vec<MaxIneqConfig> {
    let mut rng = stream_rng(seed, u64::MAX);
    (0..count)
        .map(|k| {
            let pareto = k % 2 == 1;
            let (law, q) = if pareto {
                (EntryLaw::SymPareto { q_index: 2.5 }, rng.random_range(2.0..2.4))
            } else {
                (EntryLaw::Gaussian, rng.random_range(2.0..6.0))
            };
            MaxIneqConfig {
                n: rng.random_range(1..=200),
                p: rng.random_range(1..=64),
                q,
                law,
                scale: rng.random_range(0.1..3.0),
                seed: seed.wrapping_add(k as u64 + 1),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub n: usize,
    pub reps: usize,
    pub counts: Vec<usize>,
    pub means: Vec<f64>,
    /// Fit of the mean maximum on √log N.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// R² of the same means regressed on log N, for contrast.
    pub r2_log: f64,
}

/// Mean of max_{j≤N} |n^{-1/2} Σ_i ε_i f_j(X_i)| with gaussian ε, uniform X and the bounded
/// cosine basis f_j(x) = √2 cos(π j x), for N = 2^2, ..., 2^max_pow.
pub fn sqrt_log_growth(n: usize, reps: usize, max_pow: u32, seed: u64) -> Result<GrowthReport> {
    if n == 0 || reps < 2 || max_pow < 4 {
        return Err(arg("growth check needs n ≥ 1, reps ≥ 2 and at least three sizes"));
    }
    let big = 1usize << max_pow;
    let counts: Vec<usize> = (2..=max_pow).map(|k| 1usize << k).collect();
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let mut sums = vec![0.0; big];
            for _ in 0..n {
                let x: f64 = rng.random();
                let e = NoiseLaw::Gaussian.sample(&mut rng);
                let c1 = (std::f64::consts::PI * x).cos();
                let (mut prev, mut cur) = (1.0, c1);
                for s in sums.iter_mut() {
                    *s += e * cur;
                    let next = 2.0 * c1 * cur - prev;
                    prev = cur;
                    cur = next;
                }
            }
            let norm = (2.0 / n as f64).sqrt();
            let mut running = 0.0f64;
            let mut out = Vec::with_capacity(counts.len());
            for (j, s) in sums.iter().enumerate() {
                running = running.max((s * norm).abs());
                if (j + 1).is_power_of_two() && j + 1 >= 4 {
                    out.push(running);
                }
            }
            out
        })
        .collect();
    let means: Vec<f64> = (0..counts.len()).map(|k| per_rep.iter().map(|v| v[k]).sum::<f64>() / reps as f64).collect();
    let sqrt_log: Vec<f64> = counts.iter().map(|&c| (c as f64).ln().sqrt()).collect();
    let log: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = linear_fit(&sqrt_log, &means)?;
    let fit_log = linear_fit(&log, &means)?;
    Ok(GrowthReport { n, reps, counts, means, slope: fit.coef[1], intercept: fit.coef[0], r2: fit.r2, r2_log: fit_log.r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rademacher_example() {
        let b = bound_b1(1.0, 2f64.ln(), 2.0, 1.0).unwrap();
        assert!((b - 4.92).abs() < 5e-3, "{b}");
        assert_eq!(bound_b1(0.0, 3.0, 2.0, 0.0).unwrap(), 0.0);
        let cfg = MaxIneqConfig { n: 1, p: 1, q: 2.0, law: EntryLaw::Rademacher, scale: 1.0, seed: 0 };
        let check = verify_b1(&cfg, 1000).unwrap();
        assert_eq!(check.mc_estimate, 1.0);
        assert!((check.bound - b).abs() < 1e-12);
    }

    #[test]
    fn gaussian_max_moment_matches_known_values() {
        // E|Z|^2 = 1 and E|Z|^4 = 3 for a single entry.
        assert!((max_abs_moment(EntryLaw::Gaussian, 1.0, 1, 2.0) - 1.0).abs() < 1e-10);
        assert!((max_abs_moment(EntryLaw::Gaussian, 2.0, 1, 4.0) - 48.0).abs() < 1e-8);
        // max of two |Z|: E = 2/√π·... check against Monte Carlo order of magnitude.
        let m2 = max_abs_moment(EntryLaw::Gaussian, 1.0, 2, 2.0);
        assert!(m2 > 1.0 && m2 < 2.0);
    }

    #[test]
    fn pareto_max_moment_matches_single_entry_and_mc() {
        let law = EntryLaw::SymPareto { q_index: 2.5 };
        let single = max_abs_moment(law, 1.0, 1, 2.0);
        assert!((single - NoiseLaw::SymPareto { q_index: 2.5 }.abs_moment(2.0).unwrap()).abs() < 1e-10);
        let mut rng = stream_rng(3, 0);
        let draws = 200_000;
        let mc: f64 = (0..draws)
            .map(|_| (0..4).map(|_| law.sample(&mut rng).abs()).fold(0.0f64, f64::max).powf(1.5))
            .sum::<f64>()
            / draws as f64;
        let exact = max_abs_moment(law, 1.0, 4, 1.5);
        assert!((mc / exact - 1.0).abs() < 0.03, "{mc} vs {exact}");
    }

    #[test]
    fn gaussian_example_has_slack() {
        let cfg = MaxIneqConfig { n: 100, p: 16, q: 2.0, law: EntryLaw::Gaussian, scale: 1.0, seed: 8 };
        let c = verify_b1(&cfg, 2000).unwrap();
        assert!(c.slack > 0.0);
        // p = 1 reduces to E|Σ X_i| ≈ √(2n/π).
        let cfg = MaxIneqConfig { p: 1, ..cfg };
        let c = verify_b1(&cfg, 4000).unwrap();
        assert!((c.mc_estimate / (200.0 / std::f64::consts::PI).sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn invalid_configs() {
        let cfg = MaxIneqConfig { n: 10, p: 4, q: 2.5, law: EntryLaw::SymPareto { q_index: 2.5 }, scale: 1.0, seed: 0 };
        assert!(cfg.validate().is_err());
        assert!(verify_b1(&MaxIneqConfig { q: 2.0, ..cfg.clone() }, 10).is_err());
    }

    #[test]
    fn growth_is_linear_in_sqrt_log() {
        let g = sqrt_log_growth(100, 300, 8, 1).unwrap();
        assert!(g.r2 > 0.95, "{g:?}");
        assert!(g.means.windows(2).all(|w| w[1] >= w[0]));
    }

    proptest! {
        #[test]
        fn bound_is_monotone(v in 0.0f64..100.0, l in 0.0f64..5.0, q in 2.0f64..8.0, s in 0.0f64..100.0, dv in 0.0f64..10.0, dl in 0.0f64..1.0, ds in 0.0f64..10.0) {
            let b = bound_b1(v, l, q, s).unwrap();
            prop_assert!(bound_b1(v + dv, l, q, s).unwrap() >= b);
            prop_assert!(bound_b1(v, l + dl, q, s).unwrap() >= b);
            prop_assert!(bound_b1(v, l, q, s + ds).unwrap() >= b);
        }
    }
}
