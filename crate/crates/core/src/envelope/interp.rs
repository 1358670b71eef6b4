//! Monte Carlo checks of sup-norm/L2 interpolation inequalities over random function families.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::rng::stream_rng;

const KNOTS: usize = 64;
const MI_GRID: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterpFamily {
    /// ‖f‖∞ ≤ 2‖f‖₂^{2/3} L^{1/3} for L-Lipschitz f on [0,1].
    Lipschitz { lip: f64 },
    /// ‖f‖∞ ≤ 5d‖f‖₂^{2/3} L^{1/3} for f = Σ f_j(x_j) on [0,1]^d with sup|f_j| + Lip(f_j) ≤ L.
    Additive { d: usize, lip: f64 },
    /// ‖m(b·x) − m0(b0·x)‖∞ ≤ 10 C^{−1/3} ‖·‖₂^{2/3} L^{1/3} on [0,1]², C the density floor of (b·X, b0·X).
    MultipleIndex { lip: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpReport {
    pub family: InterpFamily,
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: usize,
}

/// A piecewise-linear function given by knot abscissae and values.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|t| *t <= x).clamp(1, k.len() - 1);
        let (a, b) = (k[i - 1], k[i]);
        let u = (x - a) / (b - a);
        self.values[i - 1] + u * (self.values[i] - self.values[i - 1])
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lipschitz(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
            .fold(0.0, f64::max)
    }

    /// (∫f, ∫f²) over the knot range, normalised by its length.
    pub fn moments(&self) -> (f64, f64) {
        let span = self.knots[self.knots.len() - 1] - self.knots[0];
        let (mut m1, mut m2) = (0.0, 0.0);
        for (k, v) in self.knots.windows(2).zip(self.values.windows(2)) {
            let h = k[1] - k[0];
            m1 += h * (v[0] + v[1]) / 2.0;
            m2 += h * (v[0] * v[0] + v[0] * v[1] + v[1] * v[1]) / 3.0;
        }
        (m1 / span, m2 / span)
    }

    fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }
}

/// Random member on [lo, hi]: 64 knots, slopes uniform in [−L, L], start uniform in [−L/2, L/2].
pub fn random_lipschitz<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, lip: f64) -> PiecewiseLinear {
    let mut knots: Vec<f64> = (0..KNOTS - 2).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    knots.push(lo);
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut values = Vec::with_capacity(knots.len());
    values.push(lip * (rng.random::<f64>() - 0.5));
    for k in knots.windows(2) {
        let slope = lip * (2.0 * rng.random::<f64>() - 1.0);
        values.push(values[values.len() - 1] + slope * (k[1] - k[0]));
    }
    PiecewiseLinear { knots, values }
}

/// Random member with sup + Lip scaled to a uniform fraction of `budget`.
fn random_budgeted<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, budget: f64) -> PiecewiseLinear {
    let mut f = random_lipschitz(rng, lo, hi, 1.0);
    let size = f.sup() + f.lipschitz();
    if size > 0.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        f.scale(budget * u / size);
    }
    f
}

/// ‖f‖∞ / (2‖f‖₂^{2/3} L^{1/3}) for a piecewise-linear f on [0,1]; defined as 0 for f ≡ 0.
pub fn lipschitz_ratio(f: &PiecewiseLinear, lip: f64) -> f64 {
    let sup = f.sup();
    if sup == 0.0 {
        return 0.0;
    }
    let (_, m2) = f.moments();
    sup / (2.0 * m2.sqrt().powf(2.0 / 3.0) * lip.cbrt())
}

/// Ratio of ‖f‖∞ to the additive bound, for f = Σ f_j(x_j) on the unit cube.
pub fn additive_ratio(parts: &[PiecewiseLinear], lip: f64) -> f64 {
    let d = parts.len() as f64;
    let sup = parts.iter().map(|f| f.max()).sum::<f64>().max(-parts.iter().map(|f| f.min()).sum::<f64>());
    if sup == 0.0 {
        return 0.0;
    }
    let moments: Vec<(f64, f64)> = parts.iter().map(|f| f.moments()).collect();
    let mean: f64 = moments.iter().map(|m| m.0).sum();
    let var: f64 = moments.iter().map(|(m1, m2)| (m2 - m1 * m1).max(0.0)).sum();
    let norm = (mean * mean + var).sqrt();
    sup / (5.0 * d * norm.powf(2.0 / 3.0) * lip.cbrt())
}

fn index_range(b: (f64, f64)) -> (f64, f64) {
    let corners = [0.0, b.0, b.1, b.0 + b.1];
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn multiple_index_ratio<R: Rng + ?Sized>(rng: &mut R, lip: f64) -> f64 {
    // unit directions at least 30 degrees apart, so the joint index density stays bounded away from 0
    let (b, b0, det) = loop {
        let t: f64 = std::f64::consts::TAU * rng.random::<f64>();
        let t0: f64 = std::f64::consts::TAU * rng.random::<f64>();
        let det = (t0 - t).sin();
        if det.abs() >= 0.5 {
            break ((t.cos(), t.sin()), (t0.cos(), t0.sin()), det.abs());
        }
    };
    let (lo, hi) = index_range(b);
    let m = random_budgeted(rng, lo, hi, lip);
    let (lo0, hi0) = index_range(b0);
    let m0 = random_budgeted(rng, lo0, hi0, lip);
    let h = 1.0 / MI_GRID as f64;
    let (mut sup, mut ss) = (0.0f64, 0.0);
    for i in 0..=MI_GRID {
        for j in 0..=MI_GRID {
            let (x1, x2) = (i as f64 * h, j as f64 * h);
            let v = m.eval(b.0 * x1 + b.1 * x2) - m0.eval(b0.0 * x1 + b0.1 * x2);
            sup = sup.max(v.abs());
            // trapezoid weights on the closed grid
            let wi = if i == 0 || i == MI_GRID { 0.5 } else { 1.0 };
            let wj = if j == 0 || j == MI_GRID { 0.5 } else { 1.0 };
            ss += wi * wj * v * v * h * h;
        }
    }
    if sup == 0.0 {
        return 0.0;
    }
    let floor = 1.0 / det;
    sup / (10.0 * floor.powf(-1.0 / 3.0) * ss.sqrt().powf(2.0 / 3.0) * lip.cbrt())
}

/// Samples `samples` random members of the family and records the largest attained ratio of
/// the left side to the right side of its inequality; ratios above 1 are violations.
pub fn check_interpolation(family: InterpFamily, samples: usize, seed: u64) -> Result<InterpReport> {
    let lip = match family {
        InterpFamily::Lipschitz { lip } | InterpFamily::Additive { lip, .. } | InterpFamily::MultipleIndex { lip } => lip,
    };
    if !(lip > 0.0) || !lip.is_finite() {
        return Err(arg(format!("lip must be positive, got {lip}")));
    }
    if let InterpFamily::Additive { d, .. } = family {
        if d == 0 {
            return Err(arg("additive family needs d >= 1"));
        }
    }
    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            match family {
                InterpFamily::Lipschitz { lip } => lipschitz_ratio(&random_lipschitz(&mut rng, 0.0, 1.0, lip), lip),
                InterpFamily::Additive { d, lip } => {
                    let parts: Vec<PiecewiseLinear> = (0..d).map(|_| random_budgeted(&mut rng, 0.0, 1.0, lip)).collect();
                    additive_ratio(&parts, lip)
                }
                InterpFamily::MultipleIndex { lip } => multiple_index_ratio(&mut rng, lip),
            }
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let violations = ratios.iter().filter(|r| **r > 1.0 + 1e-12).count();
    Ok(InterpReport { family, samples, max_ratio, violations })
}
