//! Bessel functions `J_μ` and `I_μ` of real order.
//!
//! `I_μ` has two independent evaluation routes: the ascending power series
//! (summed with a floating log-scale so that it never overflows) and the
//! integral representation
//!
//! ```text
//! I_μ(z) = (1/π) ∫_0^π e^{z cos τ} cos(μτ) dτ − (sin μπ / π) ∫_0^∞ e^{−z cosh τ − μτ} dτ
//! ```
//!
//! evaluated by adaptive Gauss–Kronrod. Both are computed in exponentially
//! scaled form `e^{−z} I_μ(z)`; callers that need the raw value work with
//! [`log_bessel_i_scaled`] and exponentiate late.
//!
//! `J_μ` comes from the Poisson integral with tanh–sinh quadrature.

use std::f64::consts::PI;

use super::gamma::log_gamma;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gauss_kronrod, tanh_sinh};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677;

/// A modified Bessel value, optionally carrying the `e^{−z}` scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValue {
    pub value: f64,
    /// `true` when `value` holds `e^{−z} I_μ(z)`.
    pub scaled: bool,
}

impl BesselValue {
    /// `I_μ(z)` itself, or `Overflow` when it is not representable.
    pub fn unscaled(&self, z: f64) -> Result<f64> {
        if !self.scaled {
            return Ok(self.value);
        }
        let log_value = self.value.ln() + z;
        if log_value > f64::MAX.ln() {
            return Err(Error::Overflow { log_value });
        }
        Ok(self.value * z.exp())
    }
}

fn check_args(mu: f64, z: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel order must be >= 0, got {mu}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("Bessel argument must be > 0, got {z}")));
    }
    Ok(())
}

/// Whether [`log_bessel_i_scaled`] routes `(mu, z)` to the power series.
///
/// The integral route is used only for `z > max(12, 1.5μ)` and `μ² ≤ 16z`;
/// outside the second condition the oscillatory integral loses relative
/// accuracy like `e^{μ²/2z}` while the series (all terms positive) does not.
pub fn uses_series(mu: f64, z: f64) -> bool {
    z <= 12f64.max(1.5 * mu) || mu * mu > 16.0 * z
}

/// `ln(e^{−z} I_μ(z))`.
pub fn log_bessel_i_scaled(mu: f64, z: f64) -> Result<f64> {
    check_args(mu, z)?;
    if uses_series(mu, z) {
        log_bessel_i_scaled_series(mu, z)
    } else {
        Ok(bessel_i_scaled_integral(mu, z)?.ln())
    }
}

/// `e^{−z} I_μ(z)`, relative accuracy about 1e-13 away from underflow.
///
/// For `z` beyond about `10³` with `μ² > 16z` the series route accumulates
/// rounding over roughly `z/2` terms and degrades to about `1e-8` at `z = 10⁶`.
pub fn bessel_i_scaled(mu: f64, z: f64) -> Result<f64> {
    Ok(log_bessel_i_scaled(mu, z)?.exp())
}

/// `I_μ(z)`; `Overflow` when the value exceeds `f64::MAX`.
pub fn bessel_i(mu: f64, z: f64) -> Result<f64> {
    let log_value = log_bessel_i_scaled(mu, z)? + z;
    if log_value > f64::MAX.ln() {
        return Err(Error::Overflow { log_value });
    }
    Ok(log_value.exp())
}

/// Scaled or unscaled `I_μ(z)` wrapped in a [`BesselValue`].
pub fn modified_bessel_i(mu: f64, z: f64, scaled: bool) -> Result<BesselValue> {
    let value = if scaled { bessel_i_scaled(mu, z)? } else { bessel_i(mu, z)? };
    Ok(BesselValue { value, scaled })
}

/// Series route: `ln(e^{−z} I_μ(z))` from `Σ_j (z/2)^{μ+2j} / (j! Γ(μ+j+1))`.
pub fn log_bessel_i_scaled_series(mu: f64, z: f64) -> Result<f64> {
    check_args(mu, z)?;
    const RESCALE: f64 = 1e250;
    let lead = mu * (0.5 * z).ln() - log_gamma(mu + 1.0) - z;
    let q = 0.25 * z * z;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let max_terms = 1000 + (10.0 * z) as usize;
    for j in 0..max_terms {
        let jf = j as f64;
        let ratio = q / ((jf + 1.0) * (mu + jf + 1.0));
        term *= ratio;
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            log_scale += RESCALE.ln();
        }
        if ratio < 1.0 && term < 1e-17 * sum {
            return Ok(lead + log_scale + sum.ln());
        }
    }
    Err(Error::NonConvergence { routine: "I_mu power series", estimate: term / sum })
}

/// Integral route: `e^{−z} I_μ(z)` by quadrature of the Schläfli-type representation.
pub fn bessel_i_scaled_integral(mu: f64, z: f64) -> Result<f64> {
    check_args(mu, z)?;
    // e^{z(cos τ − 1)} falls below e^{-50} past this angle.
    let tau_max = if 2.0 * z <= 50.0 { PI } else { (1.0 - 50.0 / z).acos() };
    // Rounding floor: 1e-15 of the L¹ mass ∫ e^{z(cos τ − 1)} ≈ min(π, √(π/2z)).
    let mass = PI.min((0.5 * PI / z).sqrt());
    let oscillatory = adaptive_gauss_kronrod(
        |tau| {
            // cos τ − 1 = −2 sin²(τ/2) without cancellation
            let half = (0.5 * tau).sin();
            (-2.0 * z * half * half).exp() * (mu * tau).cos()
        },
        0.0,
        tau_max,
        1e-15 * mass,
        1e-14,
        2000,
    )?;
    let mut value = oscillatory.value / PI;
    let mut error = oscillatory.error / PI;

    let sin_mu_pi = (mu * PI).sin();
    // Exactly zero at integer order; skip the second integral there.
    if mu.fract() != 0.0 && sin_mu_pi != 0.0 {
        let tau_cut = (1.0 + 40.0 / z).acosh();
        let decaying = adaptive_gauss_kronrod(
            |tau| (-z * (tau.cosh() + 1.0) - mu * tau).exp(),
            0.0,
            tau_cut,
            1e-300,
            1e-13,
            500,
        )?;
        value -= sin_mu_pi / PI * decaying.value;
        error += decaying.error.abs() / PI;
    }
    if !(value > 0.0) || error > 1e-9 * value {
        return Err(Error::NonConvergence { routine: "I_mu integral representation", estimate: error });
    }
    Ok(value)
}

/// `ln(√π e^z (z/2)^μ / Γ(μ + 1/2))`, the logarithm of the elementary majorant
/// of `I_μ(z)` valid for `μ ≥ 0`.
pub fn log_bessel_i_rough_bound(mu: f64, z: f64) -> f64 {
    LN_SQRT_PI + z + mu * (0.5 * z).ln() - log_gamma(mu + 0.5)
}

/// `√π e^z (z/2)^μ / Γ(μ + 1/2) ≥ I_μ(z)`.
pub fn bessel_i_rough_bound(mu: f64, z: f64) -> Result<f64> {
    check_args(mu, z)?;
    let log_value = log_bessel_i_rough_bound(mu, z);
    if log_value > f64::MAX.ln() {
        return Err(Error::Overflow { log_value });
    }
    Ok(log_value.exp())
}

/// `J_μ(x)` for `μ > −1/2`, `x > 0`, from the Poisson integral.
///
/// Accuracy is about 1e-12 relative to the integral's L¹ mass; for large
/// `μ` at large `x` the integral cancels heavily and relative accuracy is
/// lost, so keep `μ` moderate when `x` is in the hundreds.
pub fn bessel_j(mu: f64, x: f64) -> Result<f64> {
    if !(mu > -0.5) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("J order must be > -1/2, got {mu}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("J argument must be > 0, got {x}")));
    }
    let power = mu - 0.5;
    let integral = if power == 0.0 {
        tanh_sinh(|s, _| (x * s).cos(), 1e-13, 16)?
    } else {
        tanh_sinh(|s, c| (x * s).cos() * (c * (2.0 - c)).powf(power), 1e-13, 16)?
    };
    let log_prefactor = mu * (0.5 * x).ln() - log_gamma(mu + 0.5) - LN_SQRT_PI;
    Ok(log_prefactor.exp() * integral.value)
}
