//! Covariate designs on the unit interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::quad::gl3;

/// A density on [0, 1] that is linear between consecutive knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRaw")]
pub struct Density {
    knots: Vec<f64>,
    values: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityRaw {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<DensityRaw> for Density {
    type Error = Error;
    fn try_from(raw: DensityRaw) -> Result<Self> {
        Density::new(raw.knots, raw.values)
    }
}

impl Density {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(arg("density needs at least two knots and one value per knot"));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(arg("density knots must start at 0 and end at 1"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(arg("density knots must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(arg("density values must be finite and nonnegative"));
        }
        let mut cdf = Vec::with_capacity(knots.len());
        cdf.push(0.0);
        for i in 0..knots.len() - 1 {
            let (a, b) = (knots[i], knots[i + 1]);
            let (va, vb) = (values[i], values[i + 1]);
            let mass = gl3().integrate(a, b, |x| va + (vb - va) * (x - a) / (b - a));
            cdf.push(cdf[i] + mass);
        }
        let total = *cdf.last().unwrap();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("density integrates to {total}, not 1")));
        }
        Ok(Self { knots, values, cdf })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let i = segment(&self.knots, x);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        self.values[i] + (self.values[i + 1] - self.values[i]) * (x - a) / (b - a)
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let total = *self.cdf.last().unwrap();
        let u = u * total;
        let i = match self.cdf.partition_point(|&c| c <= u) {
            0 => 0,
            k => (k - 1).min(self.knots.len() - 2),
        };
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let (va, vb) = (self.values[i], self.values[i + 1]);
        let need = u - self.cdf[i];
        let slope = (vb - va) / (b - a);
        // need = va*t + slope*t²/2 for t = x - a
        let t = if slope.abs() < 1e-14 {
            if va > 0.0 { need / va } else { 0.0 }
        } else {
            let disc = (va * va + 2.0 * slope * need).max(0.0);
            2.0 * need / (va + disc.sqrt())
        };
        (a + t).clamp(a, b)
    }
}

pub(crate) fn segment(knots: &[f64], x: f64) -> usize {
    let k = knots.partition_point(|&t| t <= x);
    k.saturating_sub(1).min(knots.len() - 2)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignKind {
    Uniform01,
    Grid01,
    CustomDensity { density: Density },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DesignRaw", into = "DesignRaw")]
pub struct Design {
    pub kind: DesignKind,
    pub npoints: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DesignTag {
    Uniform01,
    Grid01,
    CustomDensity,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignRaw {
    kind: DesignTag,
    npoints: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Density>,
}

impl TryFrom<DesignRaw> for Design {
    type Error = Error;
    fn try_from(raw: DesignRaw) -> Result<Self> {
        if raw.npoints == 0 {
            return Err(Error::Config("npoints must be positive".into()));
        }
        let kind = match (raw.kind, raw.density) {
            (DesignTag::CustomDensity, Some(density)) => DesignKind::CustomDensity { density },
            (DesignTag::CustomDensity, None) => {
                return Err(Error::Config("custom_density design needs a density".into()))
            }
            (_, Some(_)) => return Err(Error::Config("density applies only to custom_density".into())),
            (DesignTag::Uniform01, None) => DesignKind::Uniform01,
            (DesignTag::Grid01, None) => DesignKind::Grid01,
        };
        Ok(Self { kind, npoints: raw.npoints, seed: raw.seed })
    }
}

impl From<Design> for DesignRaw {
    fn from(d: Design) -> Self {
        let (kind, density) = match d.kind {
            DesignKind::Uniform01 => (DesignTag::Uniform01, None),
            DesignKind::Grid01 => (DesignTag::Grid01, None),
            DesignKind::CustomDensity { density } => (DesignTag::CustomDensity, Some(density)),
        };
        Self { kind, npoints: d.npoints, seed: d.seed, density }
    }
}

impl Design {
    pub fn uniform(npoints: usize, seed: u64) -> Self {
        Self { kind: DesignKind::Uniform01, npoints, seed }
    }

    pub fn grid(npoints: usize) -> Self {
        Self { kind: DesignKind::Grid01, npoints, seed: 0 }
    }

    pub fn custom(density: Density, npoints: usize, seed: u64) -> Self {
        Self { kind: DesignKind::CustomDensity { density }, npoints, seed }
    }

    pub fn with_npoints(&self, npoints: usize) -> Self {
        Self { npoints, ..self.clone() }
    }

    pub fn is_uniform_measure(&self) -> bool {
        !matches!(self.kind, DesignKind::CustomDensity { .. })
    }

    /// Density of the population measure P_X.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            DesignKind::CustomDensity { density } => density.eval(x),
            _ if (0.0..=1.0).contains(&x) => 1.0,
            _ => 0.0,
        }
    }

    /// Points where the density may lose smoothness.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            DesignKind::CustomDensity { density } => density.knots.clone(),
            _ => vec![0.0, 1.0],
        }
    }

    /// Sorted abscissae for this design, drawn from the supplied generator.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.npoints;
        let mut x: Vec<f64> = match &self.kind {
            DesignKind::Uniform01 => (0..n).map(|_| rng.random::<f64>()).collect(),
            DesignKind::Grid01 => (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
            DesignKind::CustomDensity { density } => {
                (0..n).map(|_| density.inverse_cdf(rng.random::<f64>())).collect()
            }
        };
        x.sort_by(f64::total_cmp);
        x
    }

    pub fn points(&self) -> Vec<f64> {
        let mut rng = crate::rng::stream_rng(self.seed, 0);
        self.draw(&mut rng)
    }
}
