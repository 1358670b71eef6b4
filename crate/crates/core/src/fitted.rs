//! Fitted functions on [0, 1] built from values at knots.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::truth::Evaluable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    /// Value θ_i on (x_{i-1}, x_i]; θ_1 to the left of the first knot and θ_n to the right of the last.
    PiecewiseConstantLeft,
    /// Linear interpolation, extending the first and last pieces beyond the knots.
    PiecewiseLinearLeftContinuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedFn {
    knots: Vec<f64>,
    values: Vec<f64>,
    extension: Extension,
}

impl FittedFn {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(arg("a fitted function needs matching, nonempty knots and values"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(arg("knots must be strictly increasing"));
        }
        Ok(Self { knots, values, extension })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn eval_many(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| self.eval(t)).collect()
    }
}

impl Evaluable for FittedFn {
    fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let v = &self.values;
        let n = k.len();
        match self.extension {
            Extension::PiecewiseConstantLeft => {
                let i = k.partition_point(|&t| t < x);
                v[i.min(n - 1)]
            }
            Extension::PiecewiseLinearLeftContinuous => {
                if n == 1 {
                    return v[0];
                }
                let i = k.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
                let (a, b) = (k[i], k[i + 1]);
                if x == b {
                    return v[i + 1];
                }
                let t = (x - a) / (b - a);
                v[i] + t * (v[i + 1] - v[i])
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.knots.clone()
    }

    fn piece_degree(&self) -> Option<usize> {
        Some(match self.extension {
            Extension::PiecewiseConstantLeft => 0,
            Extension::PiecewiseLinearLeftContinuous => 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn step_rule_is_left_continuous() {
        let f = FittedFn::new(vec![0.2, 0.6], vec![1.0, 3.0], Extension::PiecewiseConstantLeft).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.2), 1.0);
        assert_eq!(f.eval(0.2000001), 3.0);
        assert_eq!(f.eval(0.6), 3.0);
        assert_eq!(f.eval(1.0), 3.0);
    }

    #[test]
    fn linear_rule_extends_end_pieces() {
        let f = FittedFn::new(vec![0.25, 0.5, 0.75], vec![1.0, 0.0, 1.0], Extension::PiecewiseLinearLeftContinuous)
            .unwrap();
        assert_eq!(f.eval(0.0), 2.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(0.375), 0.5);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(FittedFn::new(vec![0.5, 0.5], vec![1.0, 1.0], Extension::PiecewiseConstantLeft).is_err());
    }

    proptest! {
        #[test]
        fn knots_return_stored_values(
            raw in prop::collection::btree_set(0u32..10_000, 1..30),
            seed in any::<u64>(),
        ) {
            let knots: Vec<f64> = raw.iter().map(|&k| k as f64 / 10_000.0).collect();
            let values: Vec<f64> = (0..knots.len()).map(|i| ((seed >> (i % 60)) & 0xff) as f64 - 100.0).collect();
            for ext in [Extension::PiecewiseConstantLeft, Extension::PiecewiseLinearLeftContinuous] {
                let f = FittedFn::new(knots.clone(), values.clone(), ext).unwrap();
                for (k, v) in knots.iter().zip(&values) {
                    prop_assert_eq!(f.eval(*k), *v);
                }
            }
        }
    }
}
