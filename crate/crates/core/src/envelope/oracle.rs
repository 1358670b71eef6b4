use crate::class::{ClassKind, ShapeClass};
use crate::error::{arg, Error, Result};
use crate::solvers::{project_values_boxed, SolverOptions, Status};
use crate::truth::{Evaluable, Truth};

pub const MIN_GRID: usize = 32;
const MAX_STEPS: usize = 200;
const REL_TOL: f64 = 1e-6;

/// The discretised neighbourhood {g : f0 + g ∈ class, ‖g‖_grid ≤ δ} on m midpoints.
///
/// The grid norm is ‖g‖² = (1/m)Σ g(t_j)². A monotone class without an explicit bound is taken
/// to be the class of nondecreasing functions into [−1, 1].
pub struct OracleGrid<'a> {
    class: &'a ShapeClass,
    pub t: Vec<f64>,
    pub f0: Vec<f64>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
    cone: bool,
    opts: SolverOptions,
}

impl<'a> OracleGrid<'a> {
    pub fn new(class: &'a ShapeClass, center: &Truth, grid_m: usize) -> Result<Self> {
        if grid_m < MIN_GRID {
            return Err(arg(format!("grid_m must be at least {MIN_GRID}, got {grid_m}")));
        }
        let m = grid_m as f64;
        let t: Vec<f64> = (0..grid_m).map(|j| (j as f64 + 0.5) / m).collect();
        let f0: Vec<f64> = t.iter().map(|&x| center.eval(x)).collect();
        let phi = match class.kind {
            ClassKind::Monotone => Some(class.phi.unwrap_or(1.0)),
            _ => class.phi,
        };
        let (lo, hi) = match phi {
            Some(p) => {
                if f0.iter().any(|v| v.abs() > p + 1e-12) {
                    return Err(arg(format!("center {} leaves the box [-{p}, {p}]", center.label())));
                }
                (Some(vec![-p; grid_m]), Some(vec![p; grid_m]))
            }
            None => (None, None),
        };
        if !class.contains_values(&t, &f0, 1e-9) {
            return Err(arg(format!("center {} is not in the {} class", center.label(), class.name())));
        }
        let cone = match (class.kind, center) {
            (ClassKind::Monotone, Truth::Zero | Truth::Constant { .. }) => true,
            (ClassKind::Convex, Truth::Zero | Truth::Constant { .. } | Truth::Linear { .. } | Truth::Identity) => true,
            _ => false,
        };
        Ok(Self { class, t, f0, lo, hi, cone, opts: SolverOptions::default() })
    }

    pub fn m(&self) -> usize {
        self.t.len()
    }

    pub fn norm(&self, g: &[f64]) -> f64 {
        (g.iter().map(|v| v * v).sum::<f64>() / self.m() as f64).sqrt()
    }

    /// Representer of g ↦ g(x) (linear interpolation between midpoints) in the grid inner product.
    pub fn representer(&self, x: f64) -> Vec<f64> {
        let m = self.m();
        let mut c = vec![0.0; m];
        let pos = x * m as f64 - 0.5;
        if pos <= 0.0 {
            c[0] = 1.0;
        } else if pos >= (m - 1) as f64 {
            c[m - 1] = 1.0;
        } else {
            let j = pos.floor() as usize;
            let frac = pos - j as f64;
            c[j] = 1.0 - frac;
            c[j + 1] = frac;
        }
        c.iter_mut().for_each(|v| *v *= m as f64);
        c
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(a, b)| a * b).sum::<f64>() / self.m() as f64
    }

    /// Projection onto the translated class, intersected with the box when present.
    pub fn project(&self, v: &[f64], with_box: bool) -> Result<Vec<f64>> {
        let shifted: Vec<f64> = v.iter().zip(&self.f0).map(|(a, b)| a + b).collect();
        let w = vec![1.0; self.m()];
        let bounds = match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) if with_box => Some((lo.as_slice(), hi.as_slice())),
            _ => None,
        };
        let out = project_values_boxed(&self.t, &shifted, &w, self.class, bounds, &self.opts)?;
        if out.status != Status::Converged {
            return Err(Error::Convergence(format!(
                "projection inside the envelope oracle stopped with residual {}",
                out.kkt_residual
            )));
        }
        Ok(out.theta.iter().zip(&self.f0).map(|(a, b)| a - b).collect())
    }

    fn in_box(&self, g: &[f64]) -> bool {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => g
                .iter()
                .zip(&self.f0)
                .zip(lo.iter().zip(hi))
                .all(|((g, f), (l, h))| g + f >= l - 1e-12 && g + f <= h + 1e-12),
            _ => true,
        }
    }

    /// sup ⟨c, g⟩ over the neighbourhood for one direction `c`.
    pub fn support(&self, c: &[f64], delta: f64) -> Result<f64> {
        if delta == 0.0 {
            return Ok(0.0);
        }
        if self.cone {
            let p = self.project(c, false)?;
            let pn = self.norm(&p);
            if pn <= 1e-300 {
                return Ok(0.0);
            }
            let g: Vec<f64> = p.iter().map(|v| v * delta / pn).collect();
            if self.in_box(&g) {
                return Ok(delta * pn);
            }
        }
        self.bisect(c, delta)
    }

    // g_t = Π(t c): both ‖g_t‖ and ⟨c, g_t⟩ are nondecreasing in t, and g_t is optimal once ‖g_t‖ = δ.
    fn bisect(&self, c: &[f64], delta: f64) -> Result<f64> {
        let eval = |t: f64| -> Result<(f64, f64)> {
            let v: Vec<f64> = c.iter().map(|a| a * t).collect();
            let g = self.project(&v, true)?;
            Ok((self.norm(&g), self.inner(c, &g)))
        };
        let mut steps = 0;
        let mut lo = (0.0, 0.0);
        let mut t_hi = delta / self.norm(c);
        let mut hi = eval(t_hi)?;
        while hi.0 <= delta {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Convergence("envelope oracle could not bracket the radius".into()));
            }
            let next_t = 2.0 * t_hi;
            let next = eval(next_t)?;
            if next.1 - hi.1 <= 1e-9 * next.1.abs().max(1e-300) && next.0 - hi.0 <= 1e-9 * next.0.max(1e-300) {
                // the set is bounded in this direction before the δ-sphere is reached
                return Ok(next.1);
            }
            lo = (t_hi, hi.1);
            t_hi = next_t;
            hi = next;
        }
        let mut t_lo = lo.0;
        let mut v_lo = lo.1;
        let mut v_hi = hi.1;
        while v_hi - v_lo > REL_TOL * v_hi.abs() && v_hi - v_lo > 1e-14 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Convergence(format!(
                    "envelope bisection did not close within {MAX_STEPS} steps (gap {})",
                    v_hi - v_lo
                )));
            }
            let t = 0.5 * (t_lo + t_hi);
            let (n, v) = eval(t)?;
            if n <= delta {
                t_lo = t;
                v_lo = v;
            } else {
                t_hi = t;
                v_hi = v;
            }
        }
        Ok(v_lo)
    }

    /// max over both signs of sup |g(x)|.
    pub fn envelope_at(&self, delta: f64, x: f64) -> Result<f64> {
        let c = self.representer(x);
        let up = self.support(&c, delta)?;
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        let down = self.support(&neg, delta)?;
        Ok(up.max(down).max(0.0))
    }
}

/// Brute-force local envelope of the class around `center` at `x`, on a grid of `grid_m` midpoints.
pub fn envelope_oracle(class: &ShapeClass, center: &Truth, delta: f64, x: f64, grid_m: usize) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(arg(format!("delta must be finite and nonnegative, got {delta}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(arg(format!("x must lie in [0, 1], got {x}")));
    }
    OracleGrid::new(class, center, grid_m)?.envelope_at(delta, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::envelope_analytic;

    #[test]
    fn monotone_matches_closed_form_in_the_middle() {
        let class = ShapeClass::monotone();
        let o = envelope_oracle(&class, &Truth::Zero, 0.1, 0.5, 256).unwrap();
        let a = envelope_analytic(&class, &Truth::Zero, 0.1, 0.5).unwrap();
        assert!((o / a - 1.0).abs() < 0.03, "{o} vs {a}");
        assert_eq!(envelope_oracle(&class, &Truth::Zero, 0.0, 0.5, 256).unwrap(), 0.0);
    }

    #[test]
    fn box_caps_the_monotone_envelope() {
        let class = ShapeClass::monotone();
        let o = envelope_oracle(&class, &Truth::Zero, 0.3, 0.002, 256).unwrap();
        assert!(o <= 1.0 + 1e-9 && o > 0.99, "{o}");
    }

    #[test]
    fn representer_reproduces_interpolation() {
        let class = ShapeClass::monotone();
        let grid = OracleGrid::new(&class, &Truth::Zero, 64).unwrap();
        let g: Vec<f64> = grid.t.iter().map(|t| t * t).collect();
        let c = grid.representer(0.3);
        let value = grid.inner(&c, &g);
        let j = (0.3f64 * 64.0 - 0.5).floor() as usize;
        let frac = 0.3 * 64.0 - 0.5 - j as f64;
        assert!((value - (g[j] * (1.0 - frac) + g[j + 1] * frac)).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_sup_envelope_at_the_edge() {
        // g with slope in [-2, 0] starting at a: ‖g‖² = a³/6, so a = (6δ²)^{1/3}
        let class = ShapeClass::holder(1.0, 1.0).unwrap();
        let delta = 0.05f64;
        let o = envelope_oracle(&class, &Truth::Identity, delta, 0.0, 512).unwrap();
        let exact = (6.0 * delta * delta).cbrt();
        assert!((o / exact - 1.0).abs() < 0.05, "{o} vs {exact}");
    }

    #[test]
    fn centre_outside_the_class_is_rejected() {
        let class = ShapeClass::monotone();
        assert!(OracleGrid::new(&class, &Truth::Sin2pi, 64).is_err());
        assert!(OracleGrid::new(&class, &Truth::Zero, 16).is_err());
    }
}
