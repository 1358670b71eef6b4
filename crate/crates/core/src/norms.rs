//! Empirical and population L2 distances on [0, 1].

use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{arg, Error, Result};
use crate::quad::{gl16, gl3, GaussLegendre};
use crate::truth::Evaluable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum L2Method {
    /// Segment-wise rules exact for piecewise quadratics, Gauss panels elsewhere.
    ExactPiecewise,
    Quadrature { order: usize, panels: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Norm {
    pub measure: Design,
    pub method: L2Method,
}

impl L2Norm {
    pub fn exact(measure: Design) -> Self {
        Self { measure, method: L2Method::ExactPiecewise }
    }

    pub fn distance(&self, f: &dyn Evaluable, g: &dyn Evaluable) -> Result<f64> {
        Ok(self.squared_distance(f, g)?.sqrt())
    }

    pub fn squared_distance(&self, f: &dyn Evaluable, g: &dyn Evaluable) -> Result<f64> {
        let integrand = |x: f64| -> Result<f64> {
            let (a, b) = (f.eval(x), g.eval(x));
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Evaluation(x));
            }
            Ok((a - b) * (a - b) * self.measure.density(x))
        };
        match self.method {
            L2Method::Quadrature { order, panels } => {
                let rule = GaussLegendre::new(order);
                integrate_checked(&rule, 0.0, 1.0, panels, integrand)
            }
            L2Method::ExactPiecewise => {
                let mut cuts = vec![0.0, 1.0];
                cuts.extend(f.breakpoints());
                cuts.extend(g.breakpoints());
                cuts.extend(self.measure.breakpoints());
                cuts.retain(|t| (0.0..=1.0).contains(t));
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let polynomial = matches!((f.piece_degree(), g.piece_degree()), (Some(a), Some(b)) if a.max(b) <= 2);
                let mut total = 0.0;
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    total += if polynomial {
                        integrate_checked(gl3(), a, b, 1, integrand)?
                    } else {
                        let panels = ((b - a) * 32.0).ceil().max(1.0) as usize;
                        integrate_checked(gl16(), a, b, panels, integrand)?
                    };
                }
                Ok(total)
            }
        }
    }
}

fn integrate_checked(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let mut err = None;
    let v = rule.integrate_panels(a, b, panels, |x| match f(x) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// ‖f − g‖ under the design's population measure.
pub fn population_l2_distance(f: &dyn Evaluable, g: &dyn Evaluable, measure: &Design) -> Result<f64> {
    L2Norm::exact(measure.clone()).distance(f, g)
}

/// sqrt of the mean of (f(x_i) − g(x_i))².
pub fn empirical_l2_distance(f: &dyn Evaluable, g: &dyn Evaluable, x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(arg("empirical norm needs at least one abscissa"));
    }
    let mut acc = 0.0;
    for &t in x {
        let (a, b) = (f.eval(t), g.eval(t));
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Evaluation(t));
        }
        acc += (a - b) * (a - b);
    }
    Ok((acc / x.len() as f64).sqrt())
}
