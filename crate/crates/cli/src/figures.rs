//! Plot-ready CSV data for envelope bands, log-log rate plots and tail survival curves.

use heavyls::envelope::{envelope_analytic, envelope_oracle, EnvelopeMethod};
use heavyls::experiment::{RateReport, TailSide};
use heavyls::{Evaluable, ShapeClass, Truth};
use rayon::prelude::*;

use crate::csvio::Table;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    EnvelopeBand,
    RateLoglog,
    TailSurvival,
}

pub fn envelope_value(class: &ShapeClass, center: &Truth, delta: f64, x: f64, method: EnvelopeMethod) -> CliResult<f64> {
    Ok(match method {
        EnvelopeMethod::Analytic => envelope_analytic(class, center, delta, x)?,
        EnvelopeMethod::Oracle { grid_m } => envelope_oracle(class, center, delta, x, grid_m)?,
    })
}

/// Rows (delta, x, lower, upper) of the band f0 ± F_δ for every δ.
pub fn envelope_band(class: &ShapeClass, center: &Truth, deltas: &[f64], xs: &[f64], method: EnvelopeMethod) -> CliResult<Table> {
    let cells: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| xs.iter().map(move |&x| (d, x))).collect();
    let values = cells
        .par_iter()
        .map(|&(d, x)| envelope_value(class, center, d, x, method))
        .collect::<CliResult<Vec<f64>>>()?;
    let mut t = Table::new(&["delta", "x", "lower", "upper"]);
    for (&(d, x), v) in cells.iter().zip(values) {
        let c = center.eval(x);
        t.push_reals(&[d, x, c - v, c + v]);
    }
    Ok(t)
}

/// Rows (log_n, log_median, fit_line); the fit column is empty without an exponent fit.
pub fn rate_loglog(report: &RateReport) -> Table {
    let mut t = Table::new(&["log_n", "log_median", "fit_line"]);
    for c in &report.cells {
        let ln = (c.n as f64).ln();
        let fit = report.exponent.as_ref().map(|e| crate::csvio::real(e.intercept + e.slope * ln)).unwrap_or_default();
        t.push(vec![crate::csvio::real(ln), crate::csvio::real(c.median.ln()), fit]);
    }
    t
}

/// Rows (log_d, log_survival) at the thresholds with positive survival.
pub fn tail_survival(side: &TailSide) -> Table {
    let mut t = Table::new(&["log_d", "log_survival"]);
    for p in side.survival.iter().filter(|p| p.survival > 0.0) {
        t.push_reals(&[p.threshold.ln(), p.survival.ln()]);
    }
    t
}

pub fn cells_table(report: &RateReport) -> Table {
    let mut t = Table::new(&["n", "reps", "nonconverged", "mean_error", "median_error", "q90_error", "mc_se"]);
    for c in &report.cells {
        let mut row = vec![c.n.to_string(), c.reps.to_string(), c.nonconverged.to_string()];
        row.extend([c.mean, c.median, c.q90, c.mc_se].iter().map(|v| crate::csvio::real(*v)));
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(class: &ShapeClass, f0: &Truth, method: EnvelopeMethod, xs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let t = envelope_band(class, f0, &[0.05, 0.2], xs, method).unwrap();
        let lo = t.column("lower").unwrap();
        let hi = t.column("upper").unwrap();
        let k = xs.len();
        (lo[..k].to_vec(), hi[..k].to_vec(), lo[k..].to_vec(), hi[k..].to_vec())
    }

    #[test]
    fn wider_delta_band_contains_narrower() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let (lo1, hi1, lo2, hi2) = band(&ShapeClass::monotone(), &Truth::Zero, EnvelopeMethod::Analytic, &xs);
        for j in 0..xs.len() {
            assert!(lo2[j] <= lo1[j] && hi1[j] <= hi2[j]);
        }
    }

    #[test]
    fn convex_band_is_widest_at_the_endpoints() {
        let m = 64;
        let xs: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
        let class = ShapeClass::convex().bounded(2.0).unwrap();
        let (lo, hi, lo2, hi2) = band(&class, &Truth::Square, EnvelopeMethod::Oracle { grid_m: m }, &xs);
        for (l, h) in [(lo, hi), (lo2, hi2)] {
            let w: Vec<f64> = l.iter().zip(&h).map(|(a, b)| b - a).collect();
            let mid = w[m / 2];
            assert!(w[0] > mid && w[m - 1] > mid, "{w:?}");
        }
    }
}
