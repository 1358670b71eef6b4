use crate::class::ShapeClass;
use crate::error::{arg, Result};
use crate::fitted::FittedFn;
use crate::sample::Sample;
use crate::solvers::{fit_class_with, SolverOptions};
use crate::truth::{Evaluable, Truth};

/// The L2 projection of `f0` onto the class, computed as the noiseless class fit on
/// `m` grid midpoints.
pub fn misspecified_target(class: &ShapeClass, f0: &Truth, m: usize) -> Result<FittedFn> {
    if m < 3 {
        return Err(arg(format!("target resolution must be at least 3, got {m}")));
    }
    let x: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    let y: Vec<f64> = x.iter().map(|&t| f0.eval(t)).collect();
    let (fit, _) = fit_class_with(&Sample::new(x, y)?, class, &SolverOptions::default())?;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::pava;
    use rand::Rng;

    #[test]
    fn class_members_are_fixed() {
        let f = misspecified_target(&ShapeClass::convex(), &Truth::Square, 512).unwrap();
        for (x, v) in f.knots().iter().zip(f.values()) {
            assert!((v - x * x).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_sine_is_pava_of_the_samples() {
        let m = 4096;
        let f = misspecified_target(&ShapeClass::monotone(), &Truth::Sin2pi, m).unwrap();
        let x: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| Truth::Sin2pi.eval(t)).collect();
        let expect = pava(&y, &vec![1.0; m]);
        for (a, b) in f.values().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let gap = (x.iter().zip(&y).map(|(&t, v)| (f.eval(t) - v).powi(2)).sum::<f64>() / m as f64).sqrt();
        assert!(gap > 0.1);
    }

    #[test]
    fn variational_inequality() {
        let m = 512;
        let f = misspecified_target(&ShapeClass::convex(), &Truth::Sin2pi, m).unwrap();
        let x: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
        let mut rng = crate::rng::stream_rng(5, 0);
        for _ in 0..100 {
            // Random convex g: a max of affine pieces.
            let pieces: Vec<(f64, f64)> = (0..4).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0))).collect();
            let inner: f64 = x
                .iter()
                .map(|&t| {
                    let g = pieces.iter().map(|(a, b)| a * (t - 0.5) + b).fold(f64::MIN, f64::max);
                    let fb = f.eval(t);
                    (Truth::Sin2pi.eval(t) - fb) * (g - fb)
                })
                .sum::<f64>()
                / m as f64;
            assert!(inner <= 1e-6, "{inner}");
        }
    }
}
