//! Principal branch W₀ of the Lambert W function.

use std::f64::consts::E;

use crate::{Error, Result};

const TOL: f64 = 1e-12;
const BRANCH_POINT: f64 = -1.0 / E;

/// W₀(z): the solution w ≥ −1 of w·e^w = z, for z ≥ −1/e.
///
/// Halley iteration; bisection on [−1, 0] takes over when Halley stalls in
/// the flat region next to the branch point.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::NonFinite("z"));
    }
    if z < BRANCH_POINT {
        // z = -1/e itself is not exactly representable; allow one ulp below
        if z >= BRANCH_POINT - 4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::InvalidParameter(format!("lambert_w0 needs z >= -1/e, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }

    let mut w = initial_guess(z);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }
    if (w * w.exp() - z).abs() <= TOL * z.abs().max(1.0) {
        return Ok(w);
    }
    bisect(z)
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.25 {
        // expansion about the branch point in p = √(2(ez + 1))
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < E {
        z.ln_1p()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn bisect(z: f64) -> Result<f64> {
    let (mut lo, mut hi) = if z < 0.0 { (-1.0, 0.0) } else { (0.0, z.max(1.0)) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() > z {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
