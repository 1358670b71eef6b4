//! Least-squares estimators over shape-constrained classes and projections onto shape cones.

mod convex;
mod dykstra;
mod holder;
mod pava;

pub use convex::ConvexProblem;
pub use dykstra::dykstra;
pub use holder::HolderProblem;
pub use pava::{monotone_kkt, pava};

use serde::{Deserialize, Serialize};

use crate::class::{ClassKind, ShapeClass};
use crate::error::{arg, Error, Result};
use crate::fitted::{Extension, FittedFn};
use crate::sample::Sample;
use crate::truth::Evaluable;

/// Largest sample for which all O(n²) Hölder pairs are imposed.
pub const HOLDER_PAIRWISE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIter,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Bound on the normalized KKT residual for a converged cone or ball fit.
    pub tol: f64,
    /// Fixed-point tolerance for the alternating projections used with a box bound.
    pub box_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, box_tol: 1e-9, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub status: Status,
}

/// Raw solver output on tie-merged data.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeKind {
    Monotone,
    ConvexSecondDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeConstraint {
    pub kind: ConeKind,
    pub abscissae: Vec<f64>,
}

impl ConeConstraint {
    pub fn new(kind: ConeKind, abscissae: Vec<f64>) -> Result<Self> {
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(arg("cone abscissae must be strictly increasing"));
        }
        Ok(Self { kind, abscissae })
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let class = match self.kind {
            ConeKind::Monotone => ShapeClass::monotone(),
            ConeKind::ConvexSecondDifference => ShapeClass::convex(),
        };
        class.contains_values(&self.abscissae, v, tol)
    }
}

/// Weighted Euclidean projection onto the cone.
pub fn project_cone(v: &[f64], cone: &ConeConstraint, weights: &[f64]) -> Result<Vec<f64>> {
    if v.len() != cone.abscissae.len() || v.len() != weights.len() {
        return Err(arg("vector, abscissae and weights must have equal length"));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(arg("weights must be positive"));
    }
    match cone.kind {
        ConeKind::Monotone => Ok(pava(v, weights)),
        ConeKind::ConvexSecondDifference if v.len() < 3 => Ok(v.to_vec()),
        ConeKind::ConvexSecondDifference => {
            let (out, _) = ConvexProblem::new(&cone.abscissae, v, weights).solve(&SolverOptions::default(), None);
            if out.status != Status::Converged {
                return Err(Error::Convergence(format!("convex projection, kkt residual {}", out.kkt_residual)));
            }
            Ok(out.theta)
        }
    }
}

/// Weighted projection of values `y` at distinct sorted `x` onto the class, including its bound.
pub fn project_values(x: &[f64], y: &[f64], w: &[f64], class: &ShapeClass, opts: &SolverOptions) -> Result<Outcome> {
    let n = x.len();
    let bounds = class.phi.map(|p| (vec![-p; n], vec![p; n]));
    project_values_boxed(x, y, w, class, bounds.as_ref().map(|(l, h)| (l.as_slice(), h.as_slice())), opts)
}

/// As [`project_values`] with explicit per-coordinate bounds replacing the class bound.
pub fn project_values_boxed(
    x: &[f64],
    y: &[f64],
    w: &[f64],
    class: &ShapeClass,
    bounds: Option<(&[f64], &[f64])>,
    opts: &SolverOptions,
) -> Result<Outcome> {
    let n = x.len();
    match class.kind {
        ClassKind::Convex if n < 3 => return Err(arg("convex fits need at least three distinct abscissae")),
        ClassKind::Holder { gamma, .. } if gamma < 1.0 && n > HOLDER_PAIRWISE_CAP => {
            return Err(arg(format!(
                "Hölder fits with gamma < 1 are capped at {HOLDER_PAIRWISE_CAP} distinct abscissae, got {n}"
            )))
        }
        _ => {}
    }
    let mut shape_iters = 0;
    let mut worst_status = Status::Converged;
    let mut warm: Option<Vec<bool>> = None;
    let mut shape = |v: &[f64]| -> Result<Outcome> {
        let out = match class.kind {
            ClassKind::Monotone => {
                let theta = pava(v, w);
                let kkt = monotone_kkt(v, w, &theta);
                Outcome { theta, iterations: 1, kkt_residual: kkt, status: Status::Converged }
            }
            ClassKind::Convex => {
                let (out, mask) = ConvexProblem::new(x, v, w).solve(opts, warm.as_deref());
                warm = Some(mask);
                out
            }
            ClassKind::Holder { gamma, lip } => HolderProblem::new(x, v, w, gamma, lip).solve(opts),
        };
        shape_iters += out.iterations;
        if out.status != Status::Converged {
            worst_status = out.status;
        }
        Ok(out)
    };
    match bounds {
        None => shape(y),
        Some((lo, hi)) => {
            if lo.iter().zip(hi).any(|(l, h)| l > h) {
                return Err(Error::Fit("empty box".into()));
            }
            let mut out = dykstra(y, lo, hi, opts, |v| shape(v).map(|o| o.theta))?;
            out.iterations = shape_iters;
            if worst_status != Status::Converged {
                out.status = worst_status;
            }
            Ok(out)
        }
    }
}

fn extension_for(class: &ShapeClass) -> Extension {
    match class.kind {
        ClassKind::Monotone => Extension::PiecewiseConstantLeft,
        _ => Extension::PiecewiseLinearLeftContinuous,
    }
}

/// The class LSE for a sample, with the class's canonical extension.
pub fn fit_class_with(sample: &Sample, class: &ShapeClass, opts: &SolverOptions) -> Result<(FittedFn, SolveReport)> {
    let data = sample.merged();
    let out = project_values(&data.x, &data.y, &data.w, class, opts)?;
    let fitted = FittedFn::new(data.x, out.theta, extension_for(class))?;
    let objective = 0.5
        * sample
            .x()
            .iter()
            .zip(sample.y())
            .map(|(&x, &y)| (y - fitted.eval(x)).powi(2))
            .sum::<f64>();
    let report = SolveReport { objective, kkt_residual: out.kkt_residual, iterations: out.iterations, status: out.status };
    Ok((fitted, report))
}

pub fn fit_class(sample: &Sample, class: &ShapeClass) -> Result<(FittedFn, SolveReport)> {
    fit_class_with(sample, class, &SolverOptions::default())
}

pub fn fit_isotonic(sample: &Sample, bound: Option<f64>) -> Result<(FittedFn, SolveReport)> {
    let class = ShapeClass::new(ClassKind::Monotone, bound)?;
    fit_class(sample, &class)
}

pub fn fit_convex(sample: &Sample, bound: Option<f64>) -> Result<(FittedFn, SolveReport)> {
    let class = ShapeClass::new(ClassKind::Convex, bound)?;
    fit_class(sample, &class)
}

pub fn fit_holder(sample: &Sample, gamma: f64, lip: f64) -> Result<(FittedFn, SolveReport)> {
    fit_class(sample, &ShapeClass::holder(gamma, lip)?)
}
