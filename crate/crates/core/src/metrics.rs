//! Recovery error metrics modulo the global phase.
//!
//! Magnitude measurements cannot distinguish `x` from `e^{i phi} x`, so every
//! distance here is minimized over the rotation in closed form: the optimal
//! phase is the argument of `<x_est, x>`.

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;
use num_complex::Complex64;

/// Relative distances below this are reported as exact recovery; floating
/// point cannot distinguish a global rotation from an error of ~1e-16.
const EXACT_RECOVERY_REL: f64 = 1e-14;

/// The unit phase factor `e^{i phi*}` minimizing `||x - e^{i phi} x_est||`:
/// the normalized inner product `<x, x_est>`.
pub fn optimal_phase(x: &ComplexSignal, x_est: &ComplexSignal) -> Result<Complex64> {
    let ip = x.inner(x_est)?;
    let r = ip.norm();
    Ok(if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        ip / r
    })
}

/// `min_phi ||x - e^{i phi} x_est||_2`, computed by aligning and subtracting
/// (no catastrophic cancellation near exact recovery).
pub fn min_phase_distance(x: &ComplexSignal, x_est: &ComplexSignal) -> Result<f64> {
    let phase = optimal_phase(x, x_est)?;
    let mut sum = 0.0;
    for (a, b) in x.iter().zip(x_est.iter()) {
        sum += (a - b * phase).norm_sqr();
    }
    Ok(sum.sqrt())
}

/// `x_est` rotated onto `x` by the optimal global phase.
pub fn align_to(x: &ComplexSignal, x_est: &ComplexSignal) -> Result<ComplexSignal> {
    Ok(x_est.scaled(optimal_phase(x, x_est)?))
}

/// Phase-invariant relative error `min_phi ||x - e^{i phi} x_est|| / ||x||`.
pub fn relative_recovery_error(x: &ComplexSignal, x_est: &ComplexSignal) -> Result<f64> {
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::DegenerateInput("reference signal is zero"));
    }
    Ok(min_phase_distance(x, x_est)? / nx)
}

/// Reconstruction error in decibels,
/// `10 log10( min_phi ||x - e^{i phi} x_est||^2 / ||x||^2 )`.
///
/// Exact recovery (relative distance below numerical resolution) is reported
/// as negative infinity.
pub fn recovery_error_db(x: &ComplexSignal, x_est: &ComplexSignal) -> Result<f64> {
    let rel = relative_recovery_error(x, x_est)?;
    if rel < EXACT_RECOVERY_REL {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (rel * rel).log10())
}
