//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_HALLEY_STEPS: usize = 50;

/// Principal branch `W0(z)`, the solution `w >= -1` of `w * exp(w) = z`.
///
/// Halley iteration from a piecewise starting point: the branch-point series
/// near `-1/e`, `ln(1 + z)` on the middle range and the two-term asymptotic
/// expansion for large `z`.
pub fn lambert_w0<T: Real>(z: T) -> Result<T> {
    let one = T::one();
    let branch = -T::E().recip();
    if z.is_nan() || z.is_infinite() {
        return Err(Error::Domain { function: "lambert_w0", value: z.as_f64() });
    }
    if z < branch {
        // admit rounding in the caller's computation of -1/e
        if branch - z <= T::epsilon() * T::lit(4.0) {
            return Ok(-one);
        }
        return Err(Error::Domain { function: "lambert_w0", value: z.as_f64() });
    }
    if z == T::zero() {
        return Ok(T::zero());
    }
    if z == branch {
        return Ok(-one);
    }

    let mut w = if z < T::lit(-0.25) {
        let p = (T::lit(2.0) * (T::E() * z + one)).max(T::zero()).sqrt();
        -one + p - p * p / T::lit(3.0) + T::lit(11.0 / 72.0) * p * p * p
    } else if z < T::lit(3.0) {
        z.ln_1p() * T::lit(0.9)
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    let tol = T::epsilon() * T::lit(4.0);
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + one;
        if wp1 == T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + T::lit(2.0)) * f / (T::lit(2.0) * wp1);
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = (w - step).max(-one);
        let done = (next - w).abs() <= tol * (one + next.abs());
        w = next;
        if done {
            break;
        }
    }
    if !w.is_finite() {
        return Err(Error::NoConvergence("lambert_w0"));
    }
    Ok(w)
}
