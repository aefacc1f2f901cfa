use std::sync::Arc;

use super::{HeatKernelEvaluator, Majorant};
use crate::error::{Error, Result};
use crate::geometry::{ConePoint, ConeQuadrature};
use crate::section::{CrossSection, SectionPoint};
use crate::special::log_bessel_i_scaled;

/// The kernel at fixed `(t, r, s)` as a function of the section points:
/// `K = Σ_j c_j H_j(y, y')`.
///
/// Truncated where the majorant tail drops below `tol · c_0 B_0`, an
/// absolute error level relative to the largest value the kernel takes.
#[derive(Debug, Clone)]
pub struct RadialSeries {
    section: Arc<dyn CrossSection>,
    coefficients: Vec<f64>,
    tail_bound: f64,
}

impl RadialSeries {
    pub fn new(ev: &HeatKernelEvaluator, t: f64, r: f64, s: f64) -> Result<Self> {
        let z = HeatKernelEvaluator::check(t, r, s)?;
        let section = ev.section();
        let available = section.block_count().unwrap_or(usize::MAX);
        let log_pre = ev.log_prefactor(t, r, s);
        let log_scale = log_bessel_i_scaled(ev.mu0(), z)?;
        let mut majorant = Majorant::new(section, z, log_scale);
        let target = ev.tol() * section.block_sup_bound(0);

        let mut coefficients = Vec::new();
        let tail = loop {
            let j = coefficients.len();
            if j == available {
                break 0.0;
            }
            if j == ev.k_max() {
                return Err(Error::TruncationFailure { blocks: j, tail_bound: majorant.suffix(j, z) });
            }
            let mu = section.block(j).expect("block within count").mu;
            coefficients.push((log_bessel_i_scaled(mu, z)? - log_scale).exp());
            if majorant.get(j + 1) <= target {
                let tail = majorant.suffix(j + 1, z);
                if tail <= target {
                    break tail;
                }
            }
        };
        let unit = (log_pre + log_scale).exp();
        for c in &mut coefficients {
            *c *= unit;
        }
        Ok(Self { section: ev.section_arc(), coefficients, tail_bound: unit * tail })
    }

    pub fn blocks(&self) -> usize {
        self.coefficients.len()
    }

    /// Bound on the omitted blocks at any `(y, y')`, kernel units.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn evaluate(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        let kernels = self.section.block_kernels(y, y2, self.coefficients.len())?;
        Ok(kernels.iter().zip(&self.coefficients).map(|(h, c)| h * c).sum())
    }
}

/// `∫_X K(t₁; p, w) K(t₂; w, q) dw` by the given cone rule.
pub fn compose(
    ev: &HeatKernelEvaluator,
    t1: f64,
    t2: f64,
    p: &ConePoint,
    q: &ConePoint,
    rule: &ConeQuadrature,
) -> Result<f64> {
    rule.integrate_by_shell(|s, angular| {
        let left = RadialSeries::new(ev, t1, p.r, s)?;
        let right = RadialSeries::new(ev, t2, s, q.r)?;
        angular
            .iter()
            .map(|(w, weight)| Ok(weight * left.evaluate(&p.y, w)? * right.evaluate(w, &q.y)?))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_radial_cut;
    use crate::section::CircleSection;
    use std::f64::consts::PI;

    fn circle() -> HeatKernelEvaluator {
        HeatKernelEvaluator::new(Arc::new(CircleSection::new(2.0 * PI, 1.0).unwrap())).unwrap()
    }

    #[test]
    fn radial_series_matches_pointwise_evaluation() {
        let ev = circle();
        let series = RadialSeries::new(&ev, 0.7, 1.2, 0.9).unwrap();
        for &theta in &[0.0, 0.4, 2.0, 3.1] {
            let p = ConePoint::new(1.2, SectionPoint::Angle(0.0)).unwrap();
            let q = ConePoint::new(0.9, SectionPoint::Angle(theta)).unwrap();
            let direct = ev.evaluate(0.7, &p, &q).unwrap();
            let fast = series.evaluate(&p.y, &q.y).unwrap();
            assert!((direct - fast).abs() < 1e-8 * direct.abs().max(series.coefficients()[0]));
        }
    }

    #[test]
    fn semigroup_on_two_cone() {
        let ev = circle();
        let p = ConePoint::new(1.0, SectionPoint::Angle(0.0)).unwrap();
        let q = ConePoint::new(1.3, SectionPoint::Angle(1.0)).unwrap();
        let rule = ConeQuadrature::new(ev.section(), default_radial_cut(1.3, 1.3, 1.0), 40, 8, 128).unwrap();
        let composed = compose(&ev, 0.5, 0.5, &p, &q, &rule).unwrap();
        let direct = ev.evaluate(1.0, &p, &q).unwrap();
        assert!((composed / direct - 1.0).abs() < 1e-6, "{composed} vs {direct}");
    }
}
