//! Regression samples and their tie-merged weighted form.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::noise::NoiseSpec;
use crate::truth::Truth;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub f0: Truth,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    x: Vec<f64>,
    y: Vec<f64>,
    pub truth: Option<Provenance>,
}

/// Distinct abscissae with multiplicity weights and mean responses.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl WeightedData {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }
}

impl Sample {
    /// Pairs are sorted by abscissa; the input order does not matter.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(arg(format!("x has {} entries but y has {}", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(arg("a sample needs at least two observations"));
        }
        if x.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(arg("abscissae must be finite and lie in [0, 1]"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(arg("responses must be finite"));
        }
        let mut pairs: Vec<(f64, f64)> = x.into_iter().zip(y).collect();
        if !pairs.windows(2).all(|w| w[0].0 <= w[1].0) {
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        let (x, y) = pairs.into_iter().unzip();
        Ok(Self { x, y, truth: None })
    }

    pub fn with_truth(mut self, truth: Provenance) -> Self {
        self.truth = Some(truth);
        self
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.x.windows(2).any(|w| w[0] == w[1])
    }

    /// Tied abscissae become one point weighted by multiplicity with the mean response.
    pub fn merged(&self) -> WeightedData {
        let mut out = WeightedData { x: Vec::new(), y: Vec::new(), w: Vec::new() };
        let mut i = 0;
        while i < self.x.len() {
            let mut j = i;
            let mut sum = 0.0;
            while j < self.x.len() && self.x[j] == self.x[i] {
                sum += self.y[j];
                j += 1;
            }
            let k = (j - i) as f64;
            out.x.push(self.x[i]);
            out.y.push(sum / k);
            out.w.push(k);
            i = j;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_validates() {
        let s = Sample::new(vec![0.7, 0.1, 0.4], vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.x(), &[0.1, 0.4, 0.7]);
        assert_eq!(s.y(), &[1.0, 2.0, 3.0]);
        assert!(Sample::new(vec![0.1], vec![1.0]).is_err());
        assert!(Sample::new(vec![0.1, 0.2], vec![1.0]).is_err());
        assert!(Sample::new(vec![0.1, 1.2], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn ties_merge_into_weighted_means() {
        let s = Sample::new(vec![0.5, 0.2, 0.5, 0.5], vec![1.0, 4.0, 2.0, 6.0]).unwrap();
        assert!(s.has_ties());
        let w = s.merged();
        assert_eq!(w.x, vec![0.2, 0.5]);
        assert_eq!(w.y, vec![4.0, 3.0]);
        assert_eq!(w.w, vec![1.0, 3.0]);
    }
}
