use std::f64::consts::PI;

use super::{invalid_point, CrossSection, SectionPoint, SpectralBlock};
use crate::error::{Error, Result};

/// The circle of circumference `L` with constant potential `a`, as the
/// cross-section of a two-dimensional cone (cone angle `L`).
///
/// Block `m` is the eigenspace `{cos, sin}(2πmθ/L)` with eigenvalue
/// `a + (2πm/L)²`; block 0 is the constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSection {
    circumference: f64,
    potential: f64,
}

impl CircleSection {
    /// Requires `L > 0` and `a > 0` (on a 2-cone `λ_0 = a`).
    pub fn new(circumference: f64, potential: f64) -> Result<Self> {
        if !(circumference > 0.0) || !circumference.is_finite() {
            return Err(Error::InvalidArgument(format!("circumference must be > 0, got {circumference}")));
        }
        if !(potential > 0.0) || !potential.is_finite() {
            return Err(Error::NonPositiveSpectrum { lambda0: potential });
        }
        Ok(Self { circumference, potential })
    }

    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    /// Angular frequency `2πm/L` of block `m`.
    pub fn frequency(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.circumference
    }

    fn angle(&self, y: &SectionPoint) -> Result<f64> {
        match *y {
            SectionPoint::Angle(theta) if (0.0..self.circumference).contains(&theta) => Ok(theta),
            _ => Err(invalid_point("circle", y)),
        }
    }

    /// Reduce an arbitrary angle into `[0, L)`.
    pub fn wrap(&self, theta: f64) -> SectionPoint {
        let w = theta.rem_euclid(self.circumference);
        SectionPoint::Angle(if w >= self.circumference { 0.0 } else { w })
    }
}

impl CrossSection for CircleSection {
    fn cone_dim(&self) -> usize {
        2
    }

    fn block_count(&self) -> Option<usize> {
        None
    }

    fn block(&self, m: usize) -> Option<SpectralBlock> {
        let k = self.frequency(m);
        Some(SpectralBlock::new(m, self.potential + k * k, if m == 0 { 1 } else { 2 }))
    }

    fn block_kernel(&self, m: usize, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        let diff = self.angle(y)? - self.angle(y2)?;
        Ok(if m == 0 {
            1.0 / self.circumference
        } else {
            2.0 / self.circumference * (self.frequency(m) * diff).cos()
        })
    }

    fn block_kernels(&self, y: &SectionPoint, y2: &SectionPoint, count: usize) -> Result<Vec<f64>> {
        let diff = self.angle(y)? - self.angle(y2)?;
        Ok((0..count)
            .map(|m| {
                if m == 0 {
                    1.0 / self.circumference
                } else {
                    2.0 / self.circumference * (self.frequency(m) * diff).cos()
                }
            })
            .collect())
    }

    fn block_sup_bound(&self, m: usize) -> f64 {
        if m == 0 {
            1.0 / self.circumference
        } else {
            2.0 / self.circumference
        }
    }

    fn distance(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        let d = (self.angle(y)? - self.angle(y2)?).abs();
        Ok(d.min(self.circumference - d))
    }

    fn validate(&self, y: &SectionPoint) -> Result<()> {
        self.angle(y).map(|_| ())
    }

    fn points_at_distance(&self, delta: f64) -> Option<(SectionPoint, SectionPoint)> {
        if !(0.0..=self.diameter()).contains(&delta) {
            return None;
        }
        let far = if delta >= self.circumference { 0.0 } else { delta };
        Some((SectionPoint::Angle(0.0), SectionPoint::Angle(far)))
    }

    fn quadrature(&self, order: usize) -> Vec<(SectionPoint, f64)> {
        let order = order.max(1);
        let w = self.circumference / order as f64;
        (0..order)
            .map(|j| (SectionPoint::Angle(j as f64 * w), w))
            .collect()
    }

    fn volume(&self) -> f64 {
        self.circumference
    }

    fn diameter(&self) -> f64 {
        0.5 * self.circumference
    }
}
