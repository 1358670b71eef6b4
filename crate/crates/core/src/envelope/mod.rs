//! Local envelopes: closed forms, a projection-based oracle, norm profiles and growth fits.

mod analytic;
mod interp;
mod oracle;

pub use analytic::envelope_analytic;
pub use interp::{check_interpolation, InterpFamily, InterpReport};
pub use oracle::{envelope_oracle, OracleGrid, MIN_GRID};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::ShapeClass;
use crate::error::{arg, Error, Result};
use crate::stats::ols;
use crate::truth::Truth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeNorm {
    Sup,
    L2,
    L3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MethodRepr", into = "MethodRepr")]
pub enum EnvelopeMethod {
    Analytic,
    Oracle { grid_m: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MethodRepr {
    Analytic {},
    Oracle { grid_m: usize },
}

impl From<MethodRepr> for EnvelopeMethod {
    fn from(r: MethodRepr) -> Self {
        match r {
            MethodRepr::Analytic {} => EnvelopeMethod::Analytic,
            MethodRepr::Oracle { grid_m } => EnvelopeMethod::Oracle { grid_m },
        }
    }
}

impl From<EnvelopeMethod> for MethodRepr {
    fn from(m: EnvelopeMethod) -> Self {
        match m {
            EnvelopeMethod::Analytic => MethodRepr::Analytic {},
            EnvelopeMethod::Oracle { grid_m } => MethodRepr::Oracle { grid_m },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub s_hat: f64,
    pub nu_hat: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeProfile {
    pub class: ShapeClass,
    pub center: Truth,
    pub method: EnvelopeMethod,
    pub deltas: Vec<f64>,
    pub norm_sup: Vec<f64>,
    pub norm_l2: Vec<f64>,
    pub norm_l3: Vec<f64>,
    /// Abscissae at which the envelope was evaluated.
    pub xs: Vec<f64>,
}

impl EnvelopeProfile {
    pub fn norms(&self, norm: EnvelopeNorm) -> &[f64] {
        match norm {
            EnvelopeNorm::Sup => &self.norm_sup,
            EnvelopeNorm::L2 => &self.norm_l2,
            EnvelopeNorm::L3 => &self.norm_l3,
        }
    }

    pub fn fit(&self, norm: EnvelopeNorm) -> Result<GrowthFit> {
        fit_growth_exponent(&self.deltas, self.norms(norm))
    }
}

/// Twelve geometric radii from 0.01 to 0.5.
pub fn default_deltas() -> Vec<f64> {
    geometric(0.01, 0.5, 12)
}

pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (r * i as f64).exp()).collect()
}

/// Profile abscissae: grid midpoints at geometrically spaced indices from each end, so that
/// endpoint spikes are resolved without evaluating every grid point.
pub fn profile_abscissae(grid_m: usize, per_half: usize) -> Vec<f64> {
    let half = grid_m / 2;
    let mut idx: Vec<usize> = (0..per_half)
        .map(|k| {
            let u = k as f64 / (per_half.max(2) - 1) as f64;
            ((half as f64).powf(u) - 1.0).round() as usize
        })
        .filter(|&i| i < half)
        .collect();
    idx.sort_unstable();
    idx.dedup();
    let mut xs: Vec<usize> = idx.iter().copied().chain(idx.iter().map(|i| grid_m - 1 - i)).collect();
    xs.sort_unstable();
    xs.dedup();
    xs.into_iter().map(|i| (i as f64 + 0.5) / grid_m as f64).collect()
}

/// ∫₀¹ F^p by the trapezoid rule on sorted abscissae, holding F constant beyond the end points.
fn integrate_power(xs: &[f64], f: &[f64], p: f64) -> f64 {
    let fp: Vec<f64> = f.iter().map(|v| v.powf(p)).collect();
    let mut total = xs[0] * fp[0] + (1.0 - xs[xs.len() - 1]) * fp[fp.len() - 1];
    for i in 1..xs.len() {
        total += 0.5 * (xs[i] - xs[i - 1]) * (fp[i] + fp[i - 1]);
    }
    total
}

/// Norms of F_δ over [0,1] for each δ, evaluated at `xs` (sorted).
pub fn envelope_profile(
    class: &ShapeClass,
    center: &Truth,
    deltas: &[f64],
    method: EnvelopeMethod,
    xs: &[f64],
) -> Result<EnvelopeProfile> {
    if deltas.is_empty() || xs.is_empty() {
        return Err(arg("a profile needs at least one radius and one abscissa"));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) || xs.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(arg("profile abscissae must be strictly increasing in [0, 1]"));
    }
    let grid = match method {
        EnvelopeMethod::Oracle { grid_m } => Some(OracleGrid::new(class, center, grid_m)?),
        EnvelopeMethod::Analytic => None,
    };
    let cells: Vec<(usize, usize)> = (0..deltas.len()).flat_map(|d| (0..xs.len()).map(move |i| (d, i))).collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(d, i)| match &grid {
            Some(g) => g.envelope_at(deltas[d], xs[i]),
            None => envelope_analytic(class, center, deltas[d], xs[i]),
        })
        .collect::<Result<_>>()?;
    let mut norm_sup = Vec::with_capacity(deltas.len());
    let mut norm_l2 = Vec::with_capacity(deltas.len());
    let mut norm_l3 = Vec::with_capacity(deltas.len());
    for row in values.chunks(xs.len()) {
        norm_sup.push(row.iter().copied().fold(0.0, f64::max));
        norm_l2.push(integrate_power(xs, row, 2.0).sqrt());
        norm_l3.push(integrate_power(xs, row, 3.0).cbrt());
    }
    Ok(EnvelopeProfile {
        class: *class,
        center: *center,
        method,
        deltas: deltas.to_vec(),
        norm_sup,
        norm_l2,
        norm_l3,
        xs: xs.to_vec(),
    })
}

/// Least squares fit of log‖F_δ‖ = c + s·log δ + ν·log log(1/δ).
pub fn fit_growth_exponent(deltas: &[f64], norms: &[f64]) -> Result<GrowthFit> {
    if deltas.len() != norms.len() {
        return Err(arg("deltas and norms must have equal length"));
    }
    if deltas.len() < 6 {
        return Err(arg(format!("growth fit needs at least 6 radii, got {}", deltas.len())));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
        return Err(arg("growth fit radii must lie in (0, 1)"));
    }
    let lo = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = deltas.iter().copied().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(arg(format!("growth fit radii must span a decade, got [{lo}, {hi}]")));
    }
    if norms.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Fit("envelope norms must be positive and finite".into()));
    }
    let first = norms[0];
    if norms.iter().all(|v| (v - first).abs() <= 1e-12 * first) {
        return Err(Error::Fit("envelope norms are all equal".into()));
    }
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let cols = vec![
        vec![1.0; deltas.len()],
        deltas.iter().map(|d| d.ln()).collect(),
        deltas.iter().map(|d| (-d.ln()).ln()).collect(),
    ];
    let fit = ols(&cols, &y)?;
    Ok(GrowthFit { s_hat: fit.coef[1], nu_hat: fit.coef[2], r2: fit.r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let d = default_deltas();
        let n: Vec<f64> = d.iter().map(|v| v.powf(2.0 / 3.0)).collect();
        let fit = fit_growth_exponent(&d, &n).unwrap();
        assert!((fit.s_hat - 2.0 / 3.0).abs() < 1e-6);
        assert!(fit.nu_hat.abs() < 1e-6);
    }

    #[test]
    fn log_correction_is_separated() {
        let d = default_deltas();
        let n: Vec<f64> = d.iter().map(|v| 3.0 * v * (-v.ln()).sqrt()).collect();
        let fit = fit_growth_exponent(&d, &n).unwrap();
        assert!((fit.s_hat - 1.0).abs() < 1e-9);
        assert!((fit.nu_hat - 0.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs_fail() {
        let d = default_deltas();
        assert!(matches!(fit_growth_exponent(&d, &vec![0.3; 12]), Err(Error::Fit(_))));
        assert!(fit_growth_exponent(&d[..5], &d[..5]).is_err());
        let narrow = geometric(0.1, 0.5, 8);
        assert!(fit_growth_exponent(&narrow, &narrow).is_err());
    }

    #[test]
    fn analytic_monotone_profile_is_nondecreasing_and_capped() {
        let xs = profile_abscissae(1 << 14, 40);
        let p = envelope_profile(&ShapeClass::monotone(), &Truth::Zero, &default_deltas(), EnvelopeMethod::Analytic, &xs)
            .unwrap();
        for norms in [&p.norm_sup, &p.norm_l2, &p.norm_l3] {
            assert!(norms.windows(2).all(|w| w[0] <= w[1] + 1e-15));
            assert!(norms.iter().all(|v| *v <= 1.0 + 1e-12));
        }
        // closed form: ‖F‖² = 2δ²(1 + log(1/(2δ²)))
        let d = p.deltas[3];
        let exact = (2.0 * d * d * (1.0 + (1.0 / (2.0 * d * d)).ln())).sqrt();
        assert!((p.norm_l2[3] / exact - 1.0).abs() < 0.02, "{} vs {exact}", p.norm_l2[3]);
    }

    #[test]
    fn abscissae_are_symmetric() {
        let xs = profile_abscissae(256, 12);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        for (a, b) in xs.iter().zip(xs.iter().rev()) {
            assert!((a + b - 1.0).abs() < 1e-12);
        }
        assert!((xs[0] - 0.5 / 256.0).abs() < 1e-15);
    }
}
