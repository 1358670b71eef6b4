//! Exact (α, s) values and moment requirements for the standard smoothness classes.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{arg, Result};

pub type Rat = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableClass {
    Holder { gamma: Rat, d: i64 },
    Sobolev { gamma: Rat, d: i64 },
    Lipschitz1d,
    HolderUnionIndicators { gamma: Rat },
}

fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || arg(format!("cannot read {s:?} as a rational"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            if let Ok(i) = s.parse::<i64>() {
                return Ok(Rat::from_integer(i));
            }
            let v: f64 = s.parse().map_err(|_| bad())?;
            Rat::approximate_float(v).ok_or_else(bad)
        }
    }
}

impl TableClass {
    /// Parses `holder(γ,d)`, `sobolev(γ,d)`, `lipschitz_1d` or `holder_union_indicators(γ)`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let (head, args) = match name.split_once('(') {
            Some((h, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| arg(format!("unbalanced parentheses in {name:?}")))?;
                (h.trim(), inner.split(',').map(str::trim).filter(|a| !a.is_empty()).collect::<Vec<_>>())
            }
            None => (name, vec![]),
        };
        let gamma_d = |args: &[&str]| -> Result<(Rat, i64)> {
            if args.len() != 2 {
                return Err(arg(format!("{head} takes (gamma, d)")));
            }
            let d: i64 = args[1].parse().map_err(|_| arg(format!("d must be a positive integer, got {}", args[1])))?;
            Ok((parse_rat(args[0])?, d))
        };
        let class = match head {
            "holder" => {
                let (gamma, d) = gamma_d(&args)?;
                TableClass::Holder { gamma, d }
            }
            "sobolev" => {
                let (gamma, d) = gamma_d(&args)?;
                TableClass::Sobolev { gamma, d }
            }
            "lipschitz_1d" | "lipschitz" if args.is_empty() => TableClass::Lipschitz1d,
            "holder_union_indicators" if args.len() == 1 => {
                TableClass::HolderUnionIndicators { gamma: parse_rat(args[0])? }
            }
            _ => return Err(arg(format!("unknown table class {name:?}"))),
        };
        class.validate()?;
        Ok(class)
    }

    fn validate(&self) -> Result<()> {
        let zero = Rat::from_integer(0);
        match *self {
            TableClass::Holder { gamma, d } | TableClass::Sobolev { gamma, d } => {
                if gamma <= zero || d < 1 {
                    return Err(arg("gamma must be positive and d at least 1"));
                }
                if matches!(self, TableClass::Sobolev { .. }) && gamma * 2 <= Rat::from_integer(1) {
                    return Err(arg("sobolev classes need gamma > 1/2"));
                }
            }
            TableClass::HolderUnionIndicators { gamma } if gamma <= zero => {
                return Err(arg("gamma must be positive"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            TableClass::Holder { gamma, d } => format!("holder({gamma},{d})"),
            TableClass::Sobolev { gamma, d } => format!("sobolev({gamma},{d})"),
            TableClass::Lipschitz1d => "lipschitz_1d".into(),
            TableClass::HolderUnionIndicators { gamma } => format!("holder_union_indicators({gamma})"),
        }
    }
}

/// (α, s) as exact rationals.
pub fn table_lookup_exact(class: &TableClass) -> Result<(Rat, Rat)> {
    class.validate()?;
    let one = Rat::from_integer(1);
    Ok(match *class {
        TableClass::Holder { gamma, d } => {
            let d = Rat::from_integer(d);
            (d / gamma, gamma * 2 / (gamma * 2 + d))
        }
        TableClass::Sobolev { gamma, d } => {
            let d = Rat::from_integer(d);
            (d / gamma, (gamma * 2 - one) / (gamma * 2 + d - one))
        }
        TableClass::Lipschitz1d => (one, Rat::new(2, 3)),
        TableClass::HolderUnionIndicators { gamma } => (one / gamma, Rat::from_integer(0)),
    })
}

pub fn table_lookup(name: &str) -> Result<(f64, f64)> {
    let (a, s) = table_lookup_exact(&TableClass::parse(name)?)?;
    Ok((to_f64(a), to_f64(s)))
}

pub fn to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub table: u8,
    pub class: String,
    pub alpha: String,
    pub s: String,
    /// Moments needed when errors are independent of X: 1 + 2/α.
    pub independent_moments: String,
    /// Moments needed under conditional moment conditions: 2/s.
    pub moments: String,
}

fn show(r: Option<Rat>) -> String {
    match r {
        Some(r) => r.to_string(),
        None => "inf".into(),
    }
}

/// Moments for the bracketing-entropy rate: 2/s, unbounded when s = 0.
pub fn moment_threshold_exact(s: Rat) -> Option<Rat> {
    if *s.numer() == 0 {
        None
    } else {
        Some(Rat::from_integer(2) / s)
    }
}

fn independent_threshold(alpha: Rat) -> Option<Rat> {
    if *alpha.numer() == 0 {
        None
    } else {
        Some(Rat::from_integer(1) + Rat::from_integer(2) / alpha)
    }
}

/// The two tables at a fixed set of (γ, d) instances.
pub fn table_rows() -> Vec<TableRow> {
    let r = Rat::new;
    let smooth = [(r(1, 1), 1), (r(2, 1), 1), (r(3, 2), 2), (r(2, 1), 3)];
    let mut t1: Vec<TableClass> = Vec::new();
    for &(gamma, d) in &smooth {
        t1.push(TableClass::Holder { gamma, d });
    }
    for &(gamma, d) in &smooth {
        t1.push(TableClass::Sobolev { gamma, d });
    }
    t1.push(TableClass::Lipschitz1d);
    let mut t3 = t1.clone();
    for gamma in [r(1, 2), r(1, 1), r(2, 1)] {
        t3.push(TableClass::HolderUnionIndicators { gamma });
    }
    let row = |table: u8, c: &TableClass| {
        let (alpha, s) = table_lookup_exact(c).expect("table instances are valid");
        TableRow {
            table,
            class: c.label(),
            alpha: alpha.to_string(),
            s: s.to_string(),
            independent_moments: if table == 3 { show(independent_threshold(alpha)) } else { String::new() },
            moments: if table == 3 { show(moment_threshold_exact(s)) } else { String::new() },
        }
    };
    t1.iter().map(|c| row(1, c)).chain(t3.iter().map(|c| row(3, c))).collect()
}

/// A symbolic row of the summary of rates under the three entropy conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub entropy: &'static str,
    pub envelope_growth: &'static str,
    pub moments: &'static str,
    pub rate: &'static str,
}

pub fn regime_rows() -> Vec<RegimeRow> {
    vec![
        RegimeRow {
            entropy: "bracketing_l2",
            envelope_growth: "||(|eps| + Phi) F_delta||_q <= C Phi^2 delta^s",
            moments: "2/s",
            rate: "n^(-1/(2+alpha))",
        },
        RegimeRow {
            entropy: "sup_norm",
            envelope_growth: "||F_delta||_inf <= C Phi^(1-s) delta^s",
            moments: "(2+alpha(1-s))/(s+alpha(1-s))",
            rate: "n^(-1/(2+alpha))",
        },
        RegimeRow {
            entropy: "vc_type",
            envelope_growth: "||F_delta|| <= C Phi^(1-s) delta^s",
            moments: "2",
            rate: "n^(-1/(2(2-s)))",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        assert_eq!(table_lookup("holder(2,1)").unwrap(), (0.5, 0.8));
        let (a, s) = table_lookup("lipschitz_1d").unwrap();
        assert_eq!(a, 1.0);
        assert!((s - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(table_lookup("holder_union_indicators(1)").unwrap(), (1.0, 0.0));
        assert!(table_lookup("besov(1,1)").is_err());
        assert!(table_lookup("sobolev(1/2,1)").is_err());
    }

    #[test]
    fn rationals_parse_and_print() {
        let c = TableClass::parse("sobolev(3/2, 2)").unwrap();
        assert_eq!(c, TableClass::Sobolev { gamma: Rat::new(3, 2), d: 2 });
        let (a, s) = table_lookup_exact(&c).unwrap();
        assert_eq!((a.to_string(), s.to_string()), ("4/3".to_string(), "1/2".to_string()));
    }

    #[test]
    fn lipschitz_row_reads_three_and_three() {
        let rows = table_rows();
        let lip = rows.iter().find(|r| r.table == 3 && r.class == "lipschitz_1d").unwrap();
        assert_eq!((lip.independent_moments.as_str(), lip.moments.as_str()), ("3", "3"));
        let union = rows.iter().find(|r| r.class == "holder_union_indicators(1/2)").unwrap();
        assert_eq!((union.alpha.as_str(), union.moments.as_str(), union.independent_moments.as_str()), ("2", "inf", "2"));
    }
}
