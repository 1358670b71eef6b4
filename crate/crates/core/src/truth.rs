//! Named regression functions and the evaluation interface shared with fitted functions.

use serde::{Deserialize, Serialize};

/// Anything that can be evaluated on [0, 1].
pub trait Evaluable: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Interior points between which the function is one polynomial piece.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Degree of every polynomial piece, when the function is piecewise polynomial.
    fn piece_degree(&self) -> Option<usize> {
        None
    }
}

/// Wraps a closure evaluated without structural knowledge.
pub struct FnRef<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Evaluable for FnRef<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TruthRaw", into = "TruthRaw")]
pub enum Truth {
    Zero,
    Constant { value: f64 },
    Linear { intercept: f64, slope: f64 },
    Identity,
    Square,
    Sin2pi,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthRaw {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intercept: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
}

impl TryFrom<TruthRaw> for Truth {
    type Error = String;
    fn try_from(raw: TruthRaw) -> std::result::Result<Self, String> {
        let t = match (raw.name.as_str(), raw.value, raw.intercept, raw.slope) {
            ("constant", Some(value), None, None) => Truth::Constant { value },
            ("linear", None, Some(intercept), Some(slope)) => Truth::Linear { intercept, slope },
            (name, None, None, None) => {
                Truth::from_name(name).ok_or_else(|| format!("unknown truth function `{name}`"))?
            }
            (name, ..) => return Err(format!("wrong parameters for truth function `{name}`")),
        };
        Ok(t)
    }
}

impl From<Truth> for TruthRaw {
    fn from(t: Truth) -> Self {
        let (name, value, intercept, slope) = match t {
            Truth::Zero => ("zero", None, None, None),
            Truth::Constant { value } => ("constant", Some(value), None, None),
            Truth::Linear { intercept, slope } => ("linear", None, Some(intercept), Some(slope)),
            Truth::Identity => ("identity", None, None, None),
            Truth::Square => ("square", None, None, None),
            Truth::Sin2pi => ("sin2pi", None, None, None),
        };
        Self { name: name.to_string(), value, intercept, slope }
    }
}

impl Truth {
    /// Parses the bare names accepted on the command line.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "zero" => Truth::Zero,
            "identity" | "x" => Truth::Identity,
            "square" | "x2" => Truth::Square,
            "sin2pi" => Truth::Sin2pi,
            _ => return None,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Truth::Zero => "zero".into(),
            Truth::Constant { value } => format!("constant({value})"),
            Truth::Linear { intercept, slope } => format!("linear({intercept},{slope})"),
            Truth::Identity => "identity".into(),
            Truth::Square => "square".into(),
            Truth::Sin2pi => "sin2pi".into(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match *self {
            Truth::Zero => 0.0,
            Truth::Constant { value } => value.abs(),
            Truth::Linear { intercept, slope } => intercept.abs().max((intercept + slope).abs()),
            Truth::Identity | Truth::Square | Truth::Sin2pi => 1.0,
        }
    }
}

impl Evaluable for Truth {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Truth::Zero => 0.0,
            Truth::Constant { value } => value,
            Truth::Linear { intercept, slope } => intercept + slope * x,
            Truth::Identity => x,
            Truth::Square => x * x,
            Truth::Sin2pi => (2.0 * std::f64::consts::PI * x).sin(),
        }
    }

    fn piece_degree(&self) -> Option<usize> {
        match self {
            Truth::Zero | Truth::Constant { .. } => Some(0),
            Truth::Linear { .. } | Truth::Identity => Some(1),
            Truth::Square => Some(2),
            Truth::Sin2pi => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_values() {
        assert_eq!(Truth::from_name("square"), Some(Truth::Square));
        assert_eq!(Truth::from_name("cube"), None);
        assert_eq!(Truth::Square.eval(0.5), 0.25);
        assert!(Truth::Sin2pi.eval(0.25) > 0.999_999);
        assert_eq!(Truth::Square.piece_degree(), Some(2));
        assert_eq!(Truth::Sin2pi.piece_degree(), None);
    }

    #[test]
    fn json_forms() {
        let t: Truth = serde_json::from_str(r#"{"name":"constant","value":2.5}"#).unwrap();
        assert_eq!(t, Truth::Constant { value: 2.5 });
        let t: Truth = serde_json::from_str(r#"{"name":"sin2pi"}"#).unwrap();
        assert_eq!(t, Truth::Sin2pi);
        assert!(serde_json::from_str::<Truth>(r#"{"name":"zero","value":1}"#).is_err());
        assert!(serde_json::from_str::<Truth>(r#"{"name":"zero","valu":1}"#).is_err());
        let lin = Truth::Linear { intercept: -0.25, slope: 0.5 };
        let back: Truth = serde_json::from_str(&serde_json::to_string(&lin).unwrap()).unwrap();
        assert_eq!(back, lin);
    }
}
