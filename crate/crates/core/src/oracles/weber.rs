use crate::error::{Error, Result};
use crate::geometry::check_radius;
use crate::quadrature::{adaptive_gauss_kronrod, Integral};
use crate::special::{bessel_j, log_bessel_i_scaled};

fn check(t: f64, r: f64, s: f64, mu: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("order must be >= 0, got {mu}")));
    }
    check_radius(r)?;
    check_radius(s)
}

/// `(2t)^{−1} e^{−(r²+s²)/4t} I_μ(rs/2t)`, assembled in log space.
pub fn weber_closed_form(t: f64, r: f64, s: f64, mu: f64) -> Result<f64> {
    check(t, r, s, mu)?;
    let z = r * s / (2.0 * t);
    Ok((-(2.0 * t).ln() - (r - s) * (r - s) / (4.0 * t) + log_bessel_i_scaled(mu, z)?).exp())
}

/// `∫_0^∞ e^{−tρ²} J_μ(rρ) J_μ(sρ) ρ dρ` by adaptive Gauss–Kronrod on
/// `[0, ρ_max]`, `ρ_max = √(40/t) + 10 max(1/r, 1/s)`.
///
/// The reported error adds the truncation tail `e^{−tρ_max²}/2t`
/// (from `|J_μ| ≤ 1`) to the quadrature estimate.
pub fn weber_quadrature(t: f64, r: f64, s: f64, mu: f64) -> Result<Integral> {
    check(t, r, s, mu)?;
    let rho_max = (40.0 / t).sqrt() + 10.0 * (1.0 / r).max(1.0 / s);
    // J evaluations are the cost; a failed J aborts through this cell
    let failure = std::cell::Cell::new(None);
    let integrand = |rho: f64| {
        let product = bessel_j(mu, r * rho).and_then(|a| Ok(a * bessel_j(mu, s * rho)?));
        match product {
            Ok(p) => (-t * rho * rho).exp() * p * rho,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let mut integral = adaptive_gauss_kronrod(integrand, 0.0, rho_max, 1e-300, 1e-9, 4000)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    integral.error += (-t * rho_max * rho_max).exp() / (2.0 * t);
    if integral.error > 1e-6 * integral.value.abs() {
        return Err(Error::NonConvergence { routine: "Weber integral quadrature", estimate: integral.error });
    }
    Ok(integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_closed_form() {
        // I_{1/2}(z) = √(2/πz) sinh z
        for &(t, r, s) in &[(1.0, 1.0, 1.0), (0.5, 2.0, 1.0), (3.0, 0.2, 4.0)] {
            let z: f64 = r * s / (2.0 * t);
            let exact = (-(r * r + s * s) / (4.0 * t)).exp() / (2.0 * t) * (2.0 / (PI * z)).sqrt() * z.sinh();
            let got = weber_closed_form(t, r, s, 0.5).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-12);
            assert_eq!(got, weber_closed_form(t, s, r, 0.5).unwrap());
        }
    }

    #[test]
    fn decays_for_large_time() {
        // ~ (2t)^{−1} (rs/4t)^μ / Γ(μ+1)
        let mu = 1.5;
        let t = 1e4;
        let lead = 1.0 / (2.0 * t) * (1.0f64 / (4.0 * t)).powf(mu) / (0.75 * PI.sqrt());
        let got = weber_closed_form(t, 1.0, 1.0, mu).unwrap();
        assert!((got / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &(t, r, s, mu) in &[(1.0, 1.0, 1.0, 0.5), (2.0, 0.5, 0.5, 0.0), (0.5, 1.0, 3.0, 2.3)] {
            let q = weber_quadrature(t, r, s, mu).unwrap();
            let c = weber_closed_form(t, r, s, mu).unwrap();
            assert!((q.value / c - 1.0).abs() < 1e-6, "({t},{r},{s},{mu}): {} vs {c}", q.value);
        }
    }

    #[test]
    fn rejects_tip() {
        assert!(weber_closed_form(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(weber_quadrature(1.0, 1.0, 0.0, 0.5).is_err());
    }
}
