//! Convex least squares by a primal active-set method over kink locations.
//!
//! The working set is the set of data points where the fit is forced to be linear; the
//! equality-constrained subproblem is then a weighted linear-spline fit with knots at the
//! remaining (free) points, solved through a tridiagonal system.

use super::{Outcome, SolverOptions, Status};

pub struct ConvexProblem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    w: &'a [f64],
    h: Vec<f64>,
    scale: f64,
    wsum: f64,
}

impl<'a> ConvexProblem<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64], w: &'a [f64]) -> Self {
        debug_assert!(x.len() >= 3 && x.len() == y.len() && y.len() == w.len());
        let h = x.windows(2).map(|p| p[1] - p[0]).collect();
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self { x, y, w, h, scale, wsum: w.iter().sum() }
    }

    fn n(&self) -> usize {
        self.x.len()
    }

    /// Slope increase at interior point k.
    fn kink(&self, v: &[f64], k: usize) -> f64 {
        (v[k + 1] - v[k]) / self.h[k] - (v[k] - v[k - 1]) / self.h[k - 1]
    }

    /// Distance of v_k below the chord of its neighbours: the kink in value units.
    fn chord_gap(&self, v: &[f64], k: usize) -> f64 {
        let (a, b) = (self.h[k - 1], self.h[k]);
        self.kink(v, k) * a * b / (a + b)
    }

    /// Weighted least-squares linear spline with knots at the endpoints and at free points.
    fn spline_fit(&self, free: &[bool]) -> Vec<f64> {
        let n = self.n();
        let mut idx = Vec::with_capacity(n);
        idx.push(0);
        idx.extend((1..n - 1).filter(|&k| free[k]));
        idx.push(n - 1);
        let m = idx.len();
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m - 1];
        let mut rhs = vec![0.0; m];
        for j in 0..m - 1 {
            let (lo, hi) = (idx[j], idx[j + 1]);
            let (tl, th) = (self.x[lo], self.x[hi]);
            let end = if j + 2 == m { hi + 1 } else { hi };
            for i in lo..end {
                let b = (self.x[i] - tl) / (th - tl);
                let a = 1.0 - b;
                let wi = self.w[i];
                diag[j] += wi * a * a;
                diag[j + 1] += wi * b * b;
                off[j] += wi * a * b;
                rhs[j] += wi * a * self.y[i];
                rhs[j + 1] += wi * b * self.y[i];
            }
        }
        let coef = solve_tridiagonal(&diag, &off, &rhs);
        let mut theta = vec![0.0; n];
        for j in 0..m - 1 {
            let (lo, hi) = (idx[j], idx[j + 1]);
            let (tl, th) = (self.x[lo], self.x[hi]);
            for i in lo..=hi {
                let b = (self.x[i] - tl) / (th - tl);
                theta[i] = (1.0 - b) * coef[j] + b * coef[j + 1];
            }
            theta[lo] = coef[j];
            theta[hi] = coef[j + 1];
        }
        theta
    }

    /// Multipliers λ_k = Σ_{i<k} r_i (x_k − x_i), normalized, plus the stationarity residual.
    fn multipliers(&self, theta: &[f64]) -> (Vec<f64>, f64) {
        let n = self.n();
        let norm = self.scale * self.wsum;
        let mut lambda = vec![0.0; n];
        let (mut s0, mut s1) = (0.0, 0.0);
        for k in 0..n {
            lambda[k] = (self.x[k] * s0 - s1) / norm;
            let r = self.w[k] * (theta[k] - self.y[k]);
            s0 += r;
            s1 += r * self.x[k];
        }
        let stationarity = (s0.abs() / norm).max(lambda[n - 1].abs());
        (lambda, stationarity)
    }

    pub fn kkt_residual(&self, theta: &[f64]) -> f64 {
        let (lambda, mut worst) = self.multipliers(theta);
        for k in 1..self.n() - 1 {
            let gap = self.chord_gap(theta, k) / self.scale;
            worst = worst.max((-gap).max(0.0));
            worst = worst.max((-lambda[k]).max(0.0));
            worst = worst.max((lambda[k] * gap).abs());
        }
        worst
    }

    fn is_feasible(&self, v: &[f64]) -> bool {
        (1..self.n() - 1).all(|k| self.kink(v, k) >= 0.0)
    }

    /// Solves the projection; `warm` is a free-point mask from a previous nearby solve.
    pub fn solve(&self, opts: &SolverOptions, warm: Option<&[bool]>) -> (Outcome, Vec<bool>) {
        let n = self.n();
        if self.is_feasible(self.y) {
            let mut free = vec![false; n];
            (1..n - 1).for_each(|k| free[k] = self.kink(self.y, k) > 0.0);
            let kkt = self.kkt_residual(self.y);
            return (Outcome { theta: self.y.to_vec(), iterations: 0, kkt_residual: kkt, status: Status::Converged }, free);
        }
        let mut free = match warm {
            Some(mask) if mask.len() == n => mask.to_vec(),
            _ => vec![false; n],
        };
        free[0] = false;
        free[n - 1] = false;
        let mut iterations = 0;
        // Drop warm-start kinks until the spline fit is feasible.
        let mut theta = self.spline_fit(&free);
        loop {
            let worst = (1..n - 1)
                .filter(|&k| free[k])
                .map(|k| (k, self.kink(&theta, k)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((k, d)) if d < 0.0 => {
                    free[k] = false;
                    theta = self.spline_fit(&free);
                    iterations += 1;
                }
                _ => break,
            }
        }
        let add_tol = 0.1 * opts.tol;
        loop {
            if iterations >= opts.max_iter {
                let kkt = self.kkt_residual(&theta);
                return (Outcome { theta, iterations, kkt_residual: kkt, status: Status::MaxIter }, free);
            }
            let (lambda, _) = self.multipliers(&theta);
            let entering = (1..n - 1)
                .filter(|&k| !free[k])
                .map(|k| (k, lambda[k]))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match entering {
                Some((k, l)) if l < -add_tol => free[k] = true,
                _ => break,
            }
            loop {
                iterations += 1;
                let cand = self.spline_fit(&free);
                let mut alpha = 1.0;
                let mut blocking = None;
                for k in (1..n - 1).filter(|&k| free[k]) {
                    let dc = self.kink(&cand, k);
                    if dc < 0.0 {
                        let dt = self.kink(&theta, k).max(0.0);
                        let a = dt / (dt - dc);
                        if a < alpha {
                            alpha = a;
                            blocking = Some(k);
                        }
                    }
                }
                match blocking {
                    None => {
                        theta = cand;
                        break;
                    }
                    Some(k) => {
                        for (t, c) in theta.iter_mut().zip(&cand) {
                            *t += alpha * (c - *t);
                        }
                        free[k] = false;
                        if iterations >= opts.max_iter {
                            break;
                        }
                    }
                }
            }
        }
        let kkt = self.kkt_residual(&theta);
        let status = if kkt <= opts.tol { Status::Converged } else { Status::MaxIter };
        (Outcome { theta, iterations, kkt_residual: kkt, status }, free)
    }
}

/// Symmetric tridiagonal solve (no pivoting; the normal matrix is positive definite).
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    if m > 1 {
        c[0] = off[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < m {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn solve(x: &[f64], y: &[f64]) -> Outcome {
        let w = vec![1.0; x.len()];
        ConvexProblem::new(x, y, &w).solve(&SolverOptions::default(), None).0
    }

    #[test]
    fn tent_becomes_its_mean() {
        let out = solve(&[0.0, 0.5, 1.0], &[0.0, 1.0, 0.0]);
        for v in out.theta {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn convex_input_is_fixed() {
        let x = [0.0, 0.1, 0.3, 0.6, 1.0];
        let y: Vec<f64> = x.iter().map(|v| (v - 0.4f64).powi(2)).collect();
        let out = solve(&x, &y);
        assert_eq!(out.theta, y);
        assert_eq!(out.status, Status::Converged);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [4.0, 5.0, 6.0];
        let off = [1.0, 2.0];
        let x = solve_tridiagonal(&diag, &off, &[6.0, 17.0, 22.0]);
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(x[2], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn noisy_fit_satisfies_kkt() {
        let n = 400;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * v + ((i * 7919) % 13) as f64 / 6.0 - 1.0).collect();
        let out = solve(&x, &y);
        assert_eq!(out.status, Status::Converged);
        assert!(out.kkt_residual <= 1e-8, "kkt {}", out.kkt_residual);
    }
}
