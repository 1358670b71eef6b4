//! Dykstra's alternating projections between a shape set and a coordinate box.

use super::{Outcome, SolverOptions, Status};
use crate::error::Result;

/// Projection of `y` onto {shape} ∩ [lo, hi]. `project` must return the (weighted)
/// projection onto the shape set; the box projection is coordinate-wise clipping.
pub fn dykstra(
    y: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &SolverOptions,
    mut project: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<Outcome> {
    let n = y.len();
    let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clip = |v: &mut [f64]| {
        for i in 0..n {
            v[i] = v[i].clamp(lo[i], hi[i]);
        }
    };
    let first = project(y)?;
    if first.iter().enumerate().all(|(i, v)| *v >= lo[i] && *v <= hi[i]) {
        return Ok(Outcome { theta: first, iterations: 1, kkt_residual: 0.0, status: Status::Converged });
    }
    let mut x = y.to_vec();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut shape = first;
    let mut buf = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        if it > 1 {
            for i in 0..n {
                buf[i] = x[i] + p[i];
            }
            shape = project(&buf)?;
        }
        for i in 0..n {
            p[i] = x[i] + p[i] - shape[i];
            buf[i] = shape[i] + q[i];
        }
        let mut next = buf.clone();
        clip(&mut next);
        residual = 0.0f64;
        for i in 0..n {
            q[i] = buf[i] - next[i];
            residual = residual.max((next[i] - x[i]).abs()).max((shape[i] - next[i]).abs());
        }
        residual /= scale;
        x = next;
        if residual <= opts.box_tol {
            return Ok(Outcome { theta: x, iterations: it, kkt_residual: residual, status: Status::Converged });
        }
    }
    Ok(Outcome { theta: x, iterations: opts.max_iter, kkt_residual: residual, status: Status::MaxIter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::pava::pava;

    #[test]
    fn monotone_box_projection_matches_clipped_pava() {
        let y = [3.0, -2.0, 0.5, 4.0, -1.0, 2.5];
        let w = [1.0; 6];
        let (lo, hi) = ([-1.0; 6], [1.0; 6]);
        let out = dykstra(&y, &lo, &hi, &SolverOptions::default(), |v| Ok(pava(v, &w))).unwrap();
        assert_eq!(out.status, Status::Converged);
        let oracle: Vec<f64> = pava(&y, &w).iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        for (a, b) in out.theta.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
