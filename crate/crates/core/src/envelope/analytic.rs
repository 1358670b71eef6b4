use crate::class::{ClassKind, ShapeClass};
use crate::error::{arg, Error, Result};
use crate::truth::Truth;

/// Closed-form envelope (or envelope bound) at `x` under the uniform design.
///
/// Monotone class with a constant centre: min{cap, δ·max(x^{-1/2}, (1−x)^{-1/2})}, where the
/// cap is Φ + |c| for a bounded class and 1 otherwise (the class bounded by one).
/// Convex class with bound Φ and any centre: min{2(2Φ)^{1/3} δ^{2/3} max(x^{-1/3}, (1−x)^{-1/3}), 2Φ}.
/// Lipschitz class (γ = 1): the sup-norm bound 2 L^{1/3} δ^{2/3}, capped at 2Φ when bounded.
pub fn envelope_analytic(class: &ShapeClass, center: &Truth, delta: f64, x: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(arg(format!("delta must be finite and nonnegative, got {delta}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(arg(format!("x must lie in [0, 1], got {x}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    match (class.kind, center) {
        (ClassKind::Monotone, Truth::Zero | Truth::Constant { .. }) => {
            let c = match center {
                Truth::Constant { value } => value.abs(),
                _ => 0.0,
            };
            let cap = class.phi.map_or(1.0, |p| p + c);
            let side = x.min(1.0 - x);
            if side == 0.0 {
                return Ok(cap);
            }
            Ok((delta / side.sqrt()).min(cap))
        }
        (ClassKind::Convex, _) => {
            let phi = class
                .phi
                .ok_or_else(|| Error::Capability("the convex closed form needs a bound phi".into()))?;
            let side = x.min(1.0 - x);
            if side == 0.0 {
                return Ok(2.0 * phi);
            }
            Ok((2.0 * (2.0 * phi).cbrt() * delta.powf(2.0 / 3.0) / side.cbrt()).min(2.0 * phi))
        }
        (ClassKind::Holder { gamma, lip }, _) if gamma == 1.0 => {
            let bound = 2.0 * lip.cbrt() * delta.powf(2.0 / 3.0);
            Ok(class.phi.map_or(bound, |p| bound.min(2.0 * p)))
        }
        _ => Err(Error::Capability(format!("{} class centred at {}", class.name(), center.label()))),
    }
}
