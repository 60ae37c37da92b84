//! The classical left-to-right band bound as a one-dimensional integral.
//!
//! For band height `h`, the expected scaled step between consecutive band
//! vertices reduces, after integrating out both heights, to
//!
//! ```text
//! (1 / 3h^5) int_0^inf e^{-z} (3h^2 z^2 asinh(h^2/z) + 2z^3 + (h^4 - 2z^2) sqrt(h^4 + z^2)) dz
//! ```
//!
//! The integrand is handled by adaptive quadrature on `(0, Z_MAX]`; the tail
//! beyond `Z_MAX` is bounded using `E sqrt(z^2 + h^4 D^2) <= z + h^2` and
//! added to the result.

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{invalid, Result};

pub const Z_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhhValue {
    pub h: f64,
    /// Quadrature value plus the tail slack.
    pub value: f64,
    pub quad_err: f64,
    pub tail: f64,
}

/// Integrand of the bound before the `1/(3h^5)` factor. At `z = 0` the
/// `z^2 log z` term vanishes, leaving `h^6`.
pub fn bhh_integrand(z: f64, h: f64) -> f64 {
    let h2 = h * h;
    let h4 = h2 * h2;
    if z <= 0.0 {
        return h4 * h2;
    }
    let log_term = 3.0 * h2 * z * z * (h2 / z).asinh();
    (-z).exp() * (log_term + 2.0 * z * z * z + (h4 - 2.0 * z * z) * (h4 + z * z).sqrt())
}

pub fn bhh_bound(h: f64) -> Result<BhhValue> {
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("h must be positive, got {h}")));
    }
    let scale = 1.0 / (3.0 * h.powi(5));
    // Split near the origin where asinh(h^2/z) varies fastest.
    let split = (h * h).min(Z_MAX);
    let q1 = integrate(|z| bhh_integrand(z, h), 0.0, split, 1e-15, 1e-14);
    let q2 = integrate(|z| bhh_integrand(z, h), split, Z_MAX, 1e-15, 1e-14);
    let h2 = h * h;
    // int_Z^inf e^{-z} 3h^4 (z + h^2) dz, times the 1/(3h^5) prefactor.
    let tail = (-Z_MAX).exp() * (Z_MAX + 1.0 + h2) / h;
    Ok(BhhValue {
        h,
        value: (q1.value + q2.value) * scale + tail,
        quad_err: (q1.abs_err + q2.abs_err) * scale,
        tail,
    })
}
