//! Logarithm of the gamma function.

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_4;

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, nine terms).
///
/// Arguments below 1/2 are shifted up with `Γ(x) = Γ(x + 1) / x`, so the
/// approximation itself is only ever applied on `[1/2, ∞)`.
pub fn log_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "log_gamma domain is x > 0");
    if x < 0.5 {
        return log_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert!(log_gamma(1.0).abs() < 1e-15);
        assert!(log_gamma(2.0).abs() < 1e-15);
        let ln_sqrt_pi = 0.5 * std::f64::consts::PI.ln();
        assert!((log_gamma(0.5) - ln_sqrt_pi).abs() < 1e-14);
        // Γ(10) = 362880
        assert!((log_gamma(10.0) - 362_880f64.ln()).abs() < 1e-13 * 362_880f64.ln());
    }

    #[test]
    fn matches_statrs_reference() {
        for &x in &[1e-6, 0.01, 0.3, 0.7, 1.5, 3.3, 17.25, 123.4, 5.0e4] {
            let ours = log_gamma(x);
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert!(
                (ours - theirs).abs() <= 1e-12 * theirs.abs().max(1.0),
                "x={x}: {ours} vs {theirs}"
            );
        }
    }

    proptest! {
        #[test]
        fn functional_equation(x in 1e-3f64..200.0) {
            let residual = log_gamma(x + 1.0) - log_gamma(x) - x.ln();
            prop_assert!(residual.abs() < 1e-12 * log_gamma(x + 1.0).abs().max(1.0));
        }
    }
}
