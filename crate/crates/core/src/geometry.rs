//! Points of the cone `C(Y) = (0, ∞) × Y`, the cone distance and
//! integration against `s^{n−1} ds dh(y)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::section::{CrossSection, SectionPoint};

/// A point `(r, y)` of the cone with `r > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    pub r: f64,
    pub y: SectionPoint,
}

impl ConePoint {
    pub fn new(r: f64, y: SectionPoint) -> Result<Self> {
        check_radius(r)?;
        Ok(Self { r, y })
    }

    /// The same section point at radius `λ r`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.r, self.y.clone())
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPoint(format!("radius {r}: cone tip excluded, r must be positive")))
    }
}

/// Cone distance from the radii and the section distance `d_h`.
pub fn cone_distance_from_parts(r: f64, s: f64, dh: f64) -> f64 {
    if dh >= PI {
        return r + s;
    }
    // r² + s² − 2rs cos d_h = (r − s)² + 4rs sin²(d_h/2), free of cancellation
    let half = (0.5 * dh).sin();
    ((r - s) * (r - s) + 4.0 * r * s * half * half).sqrt()
}

pub fn cone_distance(p: &ConePoint, q: &ConePoint, section: &dyn CrossSection) -> Result<f64> {
    let dh = section.distance(&p.y, &q.y)?;
    Ok(cone_distance_from_parts(p.r, q.r, dh))
}

/// Radial cut `max(r, s) + 12√t` for kernels at time `t`.
pub fn default_radial_cut(r: f64, s: f64, t: f64) -> f64 {
    r.max(s) + 12.0 * t.sqrt()
}

/// Tensor-product rule on `[0, R] × Y` for the measure `s^{n−1} ds dh`.
///
/// Radially: composite Gauss–Legendre on equal panels, with the first
/// panel split geometrically towards the tip, where kernels behave like
/// fractional powers of `s`.
#[derive(Debug, Clone)]
pub struct ConeQuadrature {
    radial: Vec<(f64, f64)>,
    angular: Vec<(SectionPoint, f64)>,
    radial_cut: f64,
}

impl ConeQuadrature {
    pub fn new(
        section: &dyn CrossSection,
        radial_cut: f64,
        panels: usize,
        order: usize,
        section_order: usize,
    ) -> Result<Self> {
        if !(radial_cut > 0.0) || panels == 0 || order == 0 {
            return Err(Error::InvalidArgument(format!(
                "cone quadrature needs R > 0 and positive sizes (R = {radial_cut}, panels = {panels}, order = {order})"
            )));
        }
        const GRADING: usize = 8;
        let h = radial_cut / panels as f64;
        let mut breaks = vec![0.0];
        for k in (1..=GRADING).rev() {
            breaks.push(h * 0.5f64.powi(k as i32));
        }
        breaks.extend((1..=panels).map(|i| i as f64 * h));

        let gl = GaussLegendre::new(order);
        let power = section.cone_dim() as i32 - 1;
        let radial = breaks
            .windows(2)
            .flat_map(|ab| gl.mapped(ab[0], ab[1]).collect::<Vec<_>>())
            .map(|(s, w)| (s, w * s.powi(power)))
            .collect();
        Ok(Self { radial, angular: section.quadrature(section_order), radial_cut })
    }

    /// `(s, w · s^{n−1})` pairs.
    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn angular(&self) -> &[(SectionPoint, f64)] {
        &self.angular
    }

    pub fn radial_cut(&self) -> f64 {
        self.radial_cut
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angular.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `∫_0^R ∫_Y f(s, y) s^{n−1} ds dh(y)`.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&ConePoint) -> Result<f64> + Sync,
    {
        self.integrate_by_shell(|s, angular| {
            angular
                .iter()
                .map(|(y, w)| Ok(w * f(&ConePoint { r: s, y: y.clone() })?))
                .sum()
        })
    }

    /// Like [`integrate`](Self::integrate) but hands each radial node the
    /// whole angular rule, so callers can share work across a shell.
    /// `shell(s, rule)` must return `∫_Y f(s, ·) dh` by that rule.
    pub fn integrate_by_shell<F>(&self, shell: F) -> Result<f64>
    where
        F: Fn(f64, &[(SectionPoint, f64)]) -> Result<f64> + Sync,
    {
        let parts: Vec<f64> = self
            .radial
            .par_iter()
            .map(|&(s, w)| Ok(w * shell(s, &self.angular)?))
            .collect::<Result<_>>()?;
        // ordered sum for reproducibility
        Ok(parts.iter().sum())
    }
}

/// `∫_0^R ∫_Y f s^{n−1} ds dh`; fails with `TailTooLarge` when
/// `|f| s^{n−1}` at `s = R` exceeds `tolerance` anywhere on the rule.
pub fn integrate_over_cone<F>(
    f: F,
    section: &dyn CrossSection,
    radial_cut: f64,
    panels: usize,
    order: usize,
    section_order: usize,
    tolerance: f64,
) -> Result<f64>
where
    F: Fn(&ConePoint) -> Result<f64> + Sync,
{
    let rule = ConeQuadrature::new(section, radial_cut, panels, order, section_order)?;
    let power = section.cone_dim() as i32 - 1;
    let mut edge = 0.0f64;
    for (y, _) in rule.angular() {
        let value = f(&ConePoint { r: radial_cut, y: y.clone() })?;
        edge = edge.max(value.abs() * radial_cut.powi(power));
    }
    if edge > tolerance {
        return Err(Error::TailTooLarge { value: edge, tolerance });
    }
    rule.integrate(f)
}
