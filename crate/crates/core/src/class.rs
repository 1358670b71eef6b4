//! Declarative descriptions of the function classes being fitted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassKind {
    Monotone,
    Convex,
    Holder { gamma: f64, lip: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeClassRaw", into = "ShapeClassRaw")]
pub struct ShapeClass {
    pub kind: ClassKind,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Monotone,
    Convex,
    Holder,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeClassRaw {
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lip: Option<f64>,
}

impl TryFrom<ShapeClassRaw> for ShapeClass {
    type Error = Error;
    fn try_from(raw: ShapeClassRaw) -> Result<Self> {
        let kind = match raw.kind {
            KindTag::Monotone | KindTag::Convex if raw.gamma.is_some() || raw.lip.is_some() => {
                return Err(Error::Config("gamma and lip apply only to the holder class".into()))
            }
            KindTag::Monotone => ClassKind::Monotone,
            KindTag::Convex => ClassKind::Convex,
            KindTag::Holder => ClassKind::Holder {
                gamma: raw.gamma.ok_or_else(|| Error::Config("holder class needs gamma".into()))?,
                lip: raw.lip.ok_or_else(|| Error::Config("holder class needs lip".into()))?,
            },
        };
        ShapeClass::new(kind, raw.phi)
    }
}

impl From<ShapeClass> for ShapeClassRaw {
    fn from(c: ShapeClass) -> Self {
        let (kind, gamma, lip) = match c.kind {
            ClassKind::Monotone => (KindTag::Monotone, None, None),
            ClassKind::Convex => (KindTag::Convex, None, None),
            ClassKind::Holder { gamma, lip } => (KindTag::Holder, Some(gamma), Some(lip)),
        };
        Self { kind, phi: c.phi, gamma, lip }
    }
}

impl ShapeClass {
    pub fn new(kind: ClassKind, phi: Option<f64>) -> Result<Self> {
        if let Some(p) = phi {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::Config(format!("phi must be positive, got {p}")));
            }
        }
        if let ClassKind::Holder { gamma, lip } = kind {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::Config(format!("gamma must lie in (0, 1], got {gamma}")));
            }
            if !(lip > 0.0 && lip.is_finite()) {
                return Err(Error::Config(format!("lip must be positive, got {lip}")));
            }
        }
        Ok(Self { kind, phi })
    }

    pub fn monotone() -> Self {
        Self { kind: ClassKind::Monotone, phi: None }
    }

    pub fn convex() -> Self {
        Self { kind: ClassKind::Convex, phi: None }
    }

    pub fn holder(gamma: f64, lip: f64) -> Result<Self> {
        Self::new(ClassKind::Holder { gamma, lip }, None)
    }

    pub fn bounded(self, phi: f64) -> Result<Self> {
        Self::new(self.kind, Some(phi))
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ClassKind::Monotone => "monotone",
            ClassKind::Convex => "convex",
            ClassKind::Holder { .. } => "holder",
        }
    }

    /// Whether the sequence of values at `x` satisfies the shape constraint (bound ignored).
    pub fn contains_values(&self, x: &[f64], v: &[f64], tol: f64) -> bool {
        match self.kind {
            ClassKind::Monotone => v.windows(2).all(|w| w[1] >= w[0] - tol),
            ClassKind::Convex => (1..v.len().saturating_sub(1)).all(|i| {
                let left = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
                let right = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
                right >= left - tol
            }),
            ClassKind::Holder { gamma, lip } => (0..v.len()).all(|i| {
                (i + 1..v.len()).all(|j| (v[j] - v[i]).abs() <= lip * (x[j] - x[i]).powf(gamma) + tol)
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ShapeClass::holder(0.0, 1.0).is_err());
        assert!(ShapeClass::holder(1.5, 1.0).is_err());
        assert!(ShapeClass::holder(0.5, -1.0).is_err());
        assert!(ShapeClass::convex().bounded(0.0).is_err());
        assert!(ShapeClass::holder(1.0, 2.0).is_ok());
    }

    #[test]
    fn json_shape() {
        let c: ShapeClass = serde_json::from_str(r#"{"kind":"holder","gamma":0.5,"lip":1.0}"#).unwrap();
        assert_eq!(c, ShapeClass::holder(0.5, 1.0).unwrap());
        let c: ShapeClass = serde_json::from_str(r#"{"kind":"convex","phi":2.0}"#).unwrap();
        assert_eq!(c.phi, Some(2.0));
        assert!(serde_json::from_str::<ShapeClass>(r#"{"kind":"holder","gamma":2.0,"lip":1.0}"#).is_err());
        assert_eq!(serde_json::to_string(&ShapeClass::monotone()).unwrap(), r#"{"kind":"monotone"}"#);
        let err = serde_json::from_str::<ShapeClass>(r#"{"kind":"convex","phii":2.0}"#).unwrap_err();
        assert!(err.to_string().contains("phii"));
    }

    #[test]
    fn membership() {
        let x = [0.0, 0.5, 1.0];
        assert!(ShapeClass::convex().contains_values(&x, &[1.0, 0.0, 1.0], 0.0));
        assert!(!ShapeClass::convex().contains_values(&x, &[0.0, 1.0, 0.0], 0.0));
        assert!(ShapeClass::monotone().contains_values(&x, &[0.0, 0.0, 1.0], 0.0));
        let lip = ShapeClass::holder(1.0, 1.0).unwrap();
        assert!(lip.contains_values(&x, &[0.0, 0.5, 1.0], 1e-12));
        assert!(!lip.contains_values(&x, &[0.0, 0.6, 1.0], 1e-12));
    }
}
