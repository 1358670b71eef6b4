//! Predicted convergence exponents, moment thresholds and tail powers for the three entropy regimes.

mod tables;

pub use tables::{regime_rows, table_lookup, table_lookup_exact, table_rows, RegimeRow, Rat, TableClass, TableRow};

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entropy {
    BracketingL2,
    SupNorm,
    VcType,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeInput {
    pub entropy: Entropy,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub s: f64,
    /// Number of conditional error moments; ignored in the VC regime. `null` in JSON means unbounded.
    #[serde(default = "unbounded_moments", with = "infinite_as_null")]
    pub q: f64,
}

fn unbounded_moments() -> f64 {
    f64::INFINITY
}

/// Which term of the rate minimum is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Minimax,
    MomentLimited,
    Vc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    /// e in ‖f̂ − f0‖ ≍ n^{−e}, log factors excluded.
    pub exponent: f64,
    /// Moments needed for the minimax exponent; `None` when no finite number suffices.
    #[serde(with = "infinite_as_null")]
    pub moment_threshold: f64,
    /// Polynomial decay power of P(r_n‖f̂ − f0‖ ≥ D).
    pub tail_exponent: f64,
    /// Power of log n multiplying the error bound.
    pub log_power: f64,
    pub branch: Branch,
    pub regime_notes: String,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

fn check_common(alpha: f64, s: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(arg(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(arg(format!("s must lie in [0, 1], got {s}")));
    }
    Ok(())
}

fn check_l2_regime(alpha: f64, s: f64, q: f64) -> Result<()> {
    check_common(alpha, s)?;
    if alpha >= 2.0 {
        return Err(arg(format!("this regime needs alpha < 2, got {alpha}")));
    }
    if !(q >= 2.0) {
        return Err(arg(format!("q must be at least 2, got {q}")));
    }
    Ok(())
}

/// (q−1)/(q·a + b·(q−1)), continued to q = ∞.
fn moment_branch(q: f64, a: f64, b: f64) -> f64 {
    if q.is_infinite() {
        1.0 / (a + b)
    } else {
        (q - 1.0) / (q * a + b * (q - 1.0))
    }
}

fn tail_power(q: f64, s: f64) -> f64 {
    if s == 1.0 {
        q - 0.1
    } else {
        q
    }
}

fn choose(minimax: f64, moment: f64) -> (f64, Branch) {
    if moment < minimax {
        (moment, Branch::MomentLimited)
    } else {
        (minimax, Branch::Minimax)
    }
}

/// Bracketing L2 entropy of order α with an L_q envelope growth s.
pub fn predict_bracketing(alpha: f64, s: f64, q: f64) -> Result<RatePrediction> {
    check_l2_regime(alpha, s, q)?;
    let minimax = 1.0 / (2.0 + alpha);
    let moment = moment_branch(q, 2.0 - s, alpha);
    let (exponent, branch) = choose(minimax, moment);
    let threshold = if s > 0.0 { 2.0 / s } else { f64::INFINITY };
    let regime_notes = if s == 0.0 {
        format!("s = 0: no finite moment threshold; exponent 1/(alpha + 2q/(q-1)) = {moment}")
    } else {
        match branch {
            Branch::Minimax => format!("q >= 2/s = {threshold}: minimax exponent 1/(2+alpha)"),
            _ => format!("q < 2/s = {threshold}: moment-limited exponent (q-1)/(q(2-s)+alpha(q-1))"),
        }
    };
    Ok(RatePrediction { exponent, moment_threshold: threshold, tail_exponent: tail_power(q, s), log_power: 0.0, branch, regime_notes })
}

/// Sup-norm entropy of order α with a sup-norm envelope growth s.
pub fn predict_supnorm(alpha: f64, s: f64, q: f64) -> Result<RatePrediction> {
    check_l2_regime(alpha, s, q)?;
    let minimax = 1.0 / (2.0 + alpha);
    let moment = moment_branch(q, 2.0 - s, alpha * s);
    let (exponent, branch) = choose(minimax, moment);
    let denom = s + alpha * (1.0 - s);
    let threshold = if denom > 0.0 { (2.0 + alpha * (1.0 - s)) / denom } else { f64::INFINITY };
    let regime_notes = match branch {
        Branch::Minimax => format!("q >= (2+alpha(1-s))/(s+alpha(1-s)) = {threshold}: minimax exponent 1/(2+alpha)"),
        _ => format!("q below {threshold}: moment-limited exponent (q-1)/(q(2-s)+alpha s(q-1))"),
    };
    Ok(RatePrediction { exponent, moment_threshold: threshold, tail_exponent: tail_power(q, s), log_power: 0.0, branch, regime_notes })
}

/// Uniform (VC-type) entropy with complexity α, log power β and L2 envelope growth s.
pub fn predict_vc(alpha: f64, beta: f64, s: f64) -> Result<RatePrediction> {
    check_common(alpha, s)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(arg(format!("beta must be finite and nonnegative, got {beta}")));
    }
    if alpha >= 2.0 && beta > 0.0 {
        return Err(Error::Regime(format!("no rate is available for alpha = {alpha} >= 2 with beta = {beta} > 0")));
    }
    let (exponent, log_power, regime_notes) = if alpha < 2.0 {
        (1.0 / (2.0 * (2.0 - s)), 0.0, "alpha < 2: exponent 1/(2(2-s))".to_string())
    } else if alpha == 2.0 {
        (
            1.0 / (2.0 * (2.0 - s)),
            1.0 / (2.0 - s),
            "alpha = 2: rate (sqrt(n)/log n)^{1/(2-s)}, i.e. exponent 1/(2(2-s)) with log power 1/(2-s)".to_string(),
        )
    } else {
        (1.0 / (alpha * (2.0 - s)), 0.0, "alpha > 2: exponent 1/(alpha(2-s))".to_string())
    };
    Ok(RatePrediction {
        exponent,
        moment_threshold: 2.0,
        tail_exponent: 4.0 * (2.0 - s) / 3.0,
        log_power,
        branch: Branch::Vc,
        regime_notes,
    })
}

pub fn predict(input: &RegimeInput) -> Result<RatePrediction> {
    match input.entropy {
        Entropy::BracketingL2 => {
            if input.beta != 0.0 {
                return Err(arg("beta applies only to the vc_type regime"));
            }
            predict_bracketing(input.alpha, input.s, input.q)
        }
        Entropy::SupNorm => {
            if input.beta != 0.0 {
                return Err(arg("beta applies only to the vc_type regime"));
            }
            predict_supnorm(input.alpha, input.s, input.q)
        }
        Entropy::VcType => predict_vc(input.alpha, input.beta, input.s),
    }
}

/// Entropy constant A, uniform bound Φ and conditional noise scale σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConstants {
    pub a: f64,
    pub phi: f64,
    pub sigma: f64,
}

impl Default for RateConstants {
    fn default() -> Self {
        Self { a: 1.0, phi: 1.0, sigma: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRate {
    /// The error scale 1/r_n.
    pub error_scale: f64,
    /// Index (0-based) of the active term.
    pub binding_term: usize,
}

fn argmin(terms: &[f64]) -> (f64, usize) {
    terms.iter().enumerate().fold((f64::INFINITY, 0), |best, (i, &v)| if v < best.0 { (v, i) } else { best })
}

fn argmax(terms: &[f64]) -> (f64, usize) {
    terms.iter().enumerate().fold((f64::NEG_INFINITY, 0), |best, (i, &v)| if v > best.0 { (v, i) } else { best })
}

/// The finite-sample rate expressions with explicit A, Φ and σ at sample size n.
pub fn rate_with_constants(input: &RegimeInput, n: f64, c: &RateConstants) -> Result<ConstantsRate> {
    predict(input)?;
    if !(n >= 1.0) || !(c.a > 0.0) || !(c.phi > 0.0) || !(c.sigma >= 0.0) {
        return Err(arg("n >= 1, A > 0, phi > 0 and sigma >= 0 are required"));
    }
    let RegimeInput { alpha, s, q, .. } = *input;
    let RateConstants { a, phi, sigma } = *c;
    let first = (n / a).powf(1.0 / (2.0 + alpha)) / (sigma + phi).powf(2.0 / (2.0 + alpha));
    let second = if q.is_infinite() {
        n.powf(1.0 / (2.0 - s)) / phi.powf(2.0 / (2.0 - s))
    } else {
        n.powf((q - 1.0) / (q * (2.0 - s))) / phi.powf(2.0 / (2.0 - s))
    };
    match input.entropy {
        Entropy::BracketingL2 => {
            let third = if q.is_infinite() {
                let e = 1.0 / (2.0 + alpha - s);
                n.powf(e) / (a * phi * phi).powf(e)
            } else {
                n.powf(1.0 / (2.0 + alpha + (2.0 - q * s) / (q - 1.0)))
                    / (a.powf(q - 1.0) * phi.powf(2.0 * q)).powf(1.0 / (2.0 - q * s + (2.0 + alpha) * (q - 1.0)))
            };
            let (r, i) = argmin(&[first, second, third]);
            Ok(ConstantsRate { error_scale: 1.0 / r, binding_term: i })
        }
        Entropy::SupNorm => {
            let (e, p) = if q.is_infinite() {
                let d = 2.0 - s + alpha * s;
                (1.0 / d, (2.0 - s + alpha * (s - 1.0)) / d)
            } else {
                let d = q * (2.0 - s) + alpha * s * (q - 1.0);
                ((q - 1.0) / d, (q * (2.0 - s) + alpha * (s - 1.0) * (q - 1.0)) / d)
            };
            let third = (n / a).powf(e) / phi.powf(p);
            let (r, i) = argmin(&[first, second, third]);
            Ok(ConstantsRate { error_scale: 1.0 / r, binding_term: i })
        }
        Entropy::VcType => {
            let k = 1.0 / (2.0 * (2.0 - s));
            let lead = if alpha < 2.0 {
                (a * phi * phi / n).powf(k)
            } else if alpha == 2.0 {
                (a * phi * phi * (n / a).ln().powi(2) / n).powf(k)
            } else {
                (a.powf(2.0 / alpha) * phi * phi / n.powf(2.0 / alpha)).powf(k)
            };
            let (eps, i) = argmax(&[lead, phi / n.sqrt(), (phi.powf(4.5) / n).powf(k)]);
            Ok(ConstantsRate { error_scale: eps, binding_term: i })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn bracketing_examples() {
        assert!(close(predict_bracketing(0.5, 2.0 / 3.0, 3.0).unwrap().exponent, 0.4));
        let p = predict_bracketing(1.0, 2.0 / 3.0, 3.0).unwrap();
        assert!(close(p.exponent, 1.0 / 3.0) && close(p.moment_threshold, 3.0));
        let p = predict_bracketing(1.0, 0.0, 2.0).unwrap();
        assert!(close(p.exponent, 0.2) && p.moment_threshold.is_infinite());
        assert_eq!(predict_bracketing(1.0, 1.0, 4.0).unwrap().tail_exponent, 3.9);
        assert!(predict_bracketing(2.0, 0.5, 3.0).is_err());
        assert!(predict_bracketing(1.0, 0.5, 1.5).is_err());
    }

    #[test]
    fn supnorm_examples() {
        assert!(close(predict_supnorm(1.0, 2.0 / 3.0, 3.0).unwrap().moment_threshold, 7.0 / 3.0));
        let p = predict_supnorm(1.0, 0.0, 3.0).unwrap();
        assert!(close(p.moment_threshold, 3.0) && close(p.exponent, 1.0 / 3.0));
    }

    #[test]
    fn vc_examples() {
        assert!(close(predict_vc(0.0, 1.0, 1.0).unwrap().exponent, 0.5));
        assert!(close(predict_vc(1.5, 0.0, 0.0).unwrap().exponent, 0.25));
        assert!(close(predict_vc(3.0, 0.0, 1.0).unwrap().exponent, 1.0 / 3.0));
        let p = predict_vc(2.0, 0.0, 1.0).unwrap();
        assert!(close(p.exponent, 0.5) && close(p.log_power, 1.0));
        assert!(close(predict_vc(0.5, 0.0, 0.5).unwrap().tail_exponent, 2.0));
        assert!(matches!(predict_vc(2.5, 1.0, 0.5), Err(Error::Regime(_))));
    }

    #[test]
    fn regime_input_json() {
        let r: RegimeInput = serde_json::from_str(r#"{"entropy":"sup_norm","alpha":1,"s":0.5,"q":null}"#).unwrap();
        assert!(r.q.is_infinite());
        let e = serde_json::from_str::<RegimeInput>(r#"{"entropy":"sup_norm","alpha":1,"s":0.5,"qq":3}"#).unwrap_err();
        assert!(e.to_string().contains("qq"));
        let json = serde_json::to_string(&predict_bracketing(1.0, 0.0, 3.0).unwrap()).unwrap();
        assert!(json.contains("\"moment_threshold\":null"));
    }

    #[test]
    fn constants_mode_recovers_exponents() {
        // ratio of error scales over a decade of n gives the exponent
        for (entropy, alpha, s, q) in [
            (Entropy::BracketingL2, 1.0, 2.0 / 3.0, 2.5),
            (Entropy::BracketingL2, 0.5, 0.8, 10.0),
            (Entropy::SupNorm, 1.0, 0.5, 2.2),
            (Entropy::VcType, 0.0, 1.0, 2.0),
            (Entropy::VcType, 3.0, 0.5, 2.0),
        ] {
            let input = RegimeInput { entropy, alpha, beta: 0.0, s, q };
            let c = RateConstants::default();
            let lo = rate_with_constants(&input, 1e12, &c).unwrap().error_scale;
            let hi = rate_with_constants(&input, 1e14, &c).unwrap().error_scale;
            let slope = (hi / lo).ln() / (-(100f64).ln());
            let e = predict(&input).unwrap().exponent;
            assert!((slope - e).abs() < 1e-9, "{entropy:?} {slope} vs {e}");
        }
    }
}
