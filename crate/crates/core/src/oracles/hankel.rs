use std::cell::Cell;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gauss_kronrod;
use crate::special::{bessel_j, log_gamma};

/// `x^{−α} J_μ(x)`, continued to `x = 0`.
fn radial_bessel(mu: f64, alpha: f64, x: f64) -> Result<f64> {
    if x > 0.0 {
        return Ok(x.powf(-alpha) * bessel_j(mu, x)?);
    }
    if mu > alpha {
        Ok(0.0)
    } else if mu == alpha {
        Ok((-alpha * 2f64.ln() - log_gamma(alpha + 1.0)).exp())
    } else {
        Err(Error::InvalidArgument(format!("x^-{alpha} J_{mu}(x) is unbounded at x = 0")))
    }
}

/// `(H_μ f)(ρ) = ∫_0^R (rρ)^{−(n−2)/2} J_μ(rρ) f(r) r^{n−1} dr` at every
/// `ρ` of `rho_grid`, by adaptive Gauss–Kronrod. `radial_cut` is the
/// caller's `R` beyond which `f` is negligible.
pub fn hankel_transform<F>(f: F, mu: f64, rho_grid: &[f64], n: usize, radial_cut: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {n}")));
    }
    if !(radial_cut > 0.0) {
        return Err(Error::InvalidArgument(format!("radial cut must be positive, got {radial_cut}")));
    }
    let alpha = 0.5 * (n as f64 - 2.0);
    let power = n as i32 - 1;
    rho_grid
        .par_iter()
        .map(|&rho| {
            if !(rho >= 0.0) {
                return Err(Error::InvalidArgument(format!("rho must be >= 0, got {rho}")));
            }
            let failure = Cell::new(None);
            let integrand = |r: f64| match radial_bessel(mu, alpha, r * rho) {
                Ok(j) => j * f(r) * r.powi(power),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            };
            // segment count scales with the number of oscillations
            let segments = 200 + (4.0 * rho * radial_cut) as usize;
            let integral = adaptive_gauss_kronrod(integrand, 0.0, radial_cut, 1e-15, 1e-10, segments)?;
            match failure.take() {
                Some(e) => Err(e),
                None => Ok(integral.value),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j;

    #[test]
    fn gaussian_is_self_reciprocal() {
        let rho = [0.0, 0.5, 1.0, 2.0, 4.0];
        let got = hankel_transform(|r| (-r * r).exp(), 0.0, &rho, 2, 8.0).unwrap();
        for (g, &p) in got.iter().zip(&rho) {
            let exact = 0.5 * (-p * p / 4.0).exp();
            assert!((g - exact).abs() < 1e-10, "rho={p}: {g} vs {exact}");
        }
    }

    #[test]
    fn fractional_order_in_three_dimensions() {
        // f = r^{μ−1/2} e^{−r²}: H_μ f(ρ) = ρ^{μ−1/2} e^{−ρ²/4} / 2^{μ+1}
        let mu = 2.3;
        let rho = [0.3, 1.0, 2.5];
        let got = hankel_transform(|r| r.powf(mu - 0.5) * (-r * r).exp(), mu, &rho, 3, 9.0).unwrap();
        for (g, &p) in got.iter().zip(&rho) {
            let exact = p.powf(mu - 0.5) * (-p * p / 4.0).exp() / 2f64.powf(mu + 1.0);
            assert!((g / exact - 1.0).abs() < 1e-8, "rho={p}: {g} vs {exact}");
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let got = hankel_transform(|_| 0.0, 1.0, &[0.0, 1.0, 3.0], 2, 5.0).unwrap();
        assert!(got.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transform_is_an_involution() {
        let mu = 1.0;
        let f = |r: f64| r * (-r * r).exp() * (1.0 + 0.3 * r * r);
        let inner = |rho: f64| hankel_transform(f, mu, &[rho], 2, 8.0).unwrap()[0];
        for &r in &[0.4, 1.0, 1.7] {
            let back = hankel_transform(inner, mu, &[r], 2, 14.0).unwrap()[0];
            assert!((back / f(r) - 1.0).abs() < 1e-4, "r={r}: {back} vs {}", f(r));
        }
    }

    #[test]
    fn windowed_mode_concentrates() {
        // f_W = J_μ(ρ₀ r) e^{−(r/W)²}: the transform sharpens around ρ₀ as W grows
        let (mu, rho0) = (0.5, 2.0);
        let grid: Vec<f64> = (1..=80).map(|i| 0.05 * i as f64).collect();
        let mut fractions = Vec::new();
        for &w in &[2.0, 4.0, 8.0] {
            let f = |r: f64| bessel_j(mu, rho0 * r).unwrap() * (-(r / w) * (r / w)).exp();
            let h = hankel_transform(f, mu, &grid, 2, 6.0 * w).unwrap();
            let total: f64 = h.iter().map(|v| v * v).sum();
            let near: f64 = grid
                .iter()
                .zip(&h)
                .filter(|(p, _)| (*p - rho0).abs() <= 0.25)
                .map(|(_, v)| v * v)
                .sum();
            fractions.push(near / total);
        }
        assert!(fractions[0] < fractions[1] && fractions[1] < fractions[2], "{fractions:?}");
        assert!(fractions[2] > 0.5, "{fractions:?}");
    }
}
