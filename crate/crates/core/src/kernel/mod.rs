//! The heat kernel of `−Δ_g + V_0(y) r^{−2}` on `C(Y)` as the
//! eigenfunction–Bessel series
//!
//! ```text
//! K(t; r,y; s,y') = (2t)^{−1} e^{−(r²+s²)/4t} (rs)^{−(n−2)/2} Σ_k H_k(y,y') I_{μ_k}(rs/2t)
//! ```
//!
//! Terms are assembled in log space from `e^{−z} I_μ(z)`, `z = rs/2t`, so the
//! prefactor becomes `(2t)^{−1} (rs)^{−(n−2)/2} e^{−(r−s)²/4t}`.
//!
//! Truncation is certified with the majorant
//! `|H_k I_{μ_k}(z)| ≤ B_k √π e^z (z/2)^{μ_k} / Γ(μ_k + 1/2)`.

mod bound;
mod lemma;
mod radial;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use bound::{fit_bound_constants, scan_csv, BoundReport, CandidateFit, ScanRow, WorstPoint};
pub use lemma::{lemma_key_check, BranchFit, LemmaOptions, LemmaReport, PowerFit};
pub use radial::{compose, RadialSeries};

use crate::error::{Error, Result};
use crate::geometry::{check_radius, cone_distance_from_parts, ConePoint};
use crate::section::{CrossSection, SectionPoint};
use crate::special::{log_bessel_i_scaled, log_gamma};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677;

/// A grid point `(t, r, s, d_h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub dh: f64,
}

/// A kernel value with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Number of spectral blocks summed.
    pub blocks: usize,
    /// Certified bound on the omitted blocks, in kernel units.
    pub tail_bound: f64,
    /// Floating-point noise level of the partial sum, in kernel units.
    pub rounding_floor: f64,
}

impl KernelValue {
    /// Whether rounding noise is below `rel` of the value.
    pub fn is_resolved(&self, rel: f64) -> bool {
        self.rounding_floor <= rel * self.value.abs()
    }
}

/// `Σ_k H_k(y,y') e^{−z} I_{μ_k}(z)`, stored as `exp(log_scale) · sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub log_scale: f64,
    pub sum: f64,
    pub abs_sum: f64,
    pub blocks: usize,
    /// Majorant of the omitted blocks, same units as `sum`.
    pub tail: f64,
}

/// Lazily extended majorant `b_j = B_j √π (z/2)^{μ_j} / Γ(μ_j+1/2)` of
/// `|H_j e^{−z} I_{μ_j}(z)|`, in units of `exp(log_scale)`.
pub(crate) struct Majorant<'a> {
    section: &'a dyn CrossSection,
    log_half_z: f64,
    log_scale: f64,
    limit: usize,
    values: Vec<f64>,
}

impl<'a> Majorant<'a> {
    pub(crate) fn new(section: &'a dyn CrossSection, z: f64, log_scale: f64) -> Self {
        Self {
            section,
            log_half_z: (0.5 * z).ln(),
            log_scale,
            limit: section.block_count().unwrap_or(usize::MAX),
            values: Vec::new(),
        }
    }

    fn mu(&self, j: usize) -> f64 {
        self.section.block(j).map_or(f64::INFINITY, |b| b.mu)
    }

    pub(crate) fn get(&mut self, j: usize) -> f64 {
        while self.values.len() <= j {
            let k = self.values.len();
            let value = match self.section.block(k) {
                Some(b) if k < self.limit => (self.section.block_sup_bound(k).ln() + LN_SQRT_PI
                    + b.mu * self.log_half_z
                    - log_gamma(b.mu + 0.5)
                    - self.log_scale)
                    .exp(),
                _ => 0.0,
            };
            self.values.push(value);
        }
        self.values[j]
    }

    /// `Σ_{j ≥ from} b_j`. Past the peak of the majorant the ratios
    /// `b_{j+1}/b_j` decrease, so once a ratio drops below 1/2 the rest is
    /// bounded by a geometric series.
    pub(crate) fn suffix(&mut self, from: usize, z: f64) -> f64 {
        const MAX_SPAN: usize = 1 << 20;
        let mut total = 0.0;
        let mut j = from;
        loop {
            if j >= self.limit {
                return total;
            }
            if j - from > MAX_SPAN {
                return f64::INFINITY;
            }
            let b = self.get(j);
            total += b;
            if j > 0 && self.mu(j) > z.max(1.0) {
                let prev = self.get(j - 1);
                let ratio = if prev > 0.0 { b / prev } else { 0.0 };
                if b == 0.0 {
                    return total;
                }
                if ratio < 0.5 && b <= 1e-18 * total {
                    return total + b * ratio / (1.0 - ratio);
                }
            }
            j += 1;
        }
    }
}

/// Evaluates the heat kernel of the cone over a fixed cross-section.
#[derive(Debug, Clone)]
pub struct HeatKernelEvaluator {
    section: Arc<dyn CrossSection>,
    tol: f64,
    k_max: usize,
}

impl HeatKernelEvaluator {
    pub const DEFAULT_TOL: f64 = 1e-8;
    pub const DEFAULT_K_MAX: usize = 4096;

    pub fn new(section: Arc<dyn CrossSection>) -> Result<Self> {
        let ground = section
            .block(0)
            .ok_or_else(|| Error::InvalidArgument("section has no spectral data".into()))?;
        if !(ground.lambda > 0.0) {
            return Err(Error::NonPositiveSpectrum { lambda0: ground.lambda });
        }
        if section.cone_dim() < 2 {
            return Err(Error::InvalidArgument(format!("cone dimension must be >= 2, got {}", section.cone_dim())));
        }
        Ok(Self { section, tol: Self::DEFAULT_TOL, k_max: Self::DEFAULT_K_MAX })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_k_max(mut self, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be positive".into()));
        }
        self.k_max = k_max;
        Ok(self)
    }

    pub fn section(&self) -> &dyn CrossSection {
        self.section.as_ref()
    }

    pub fn section_arc(&self) -> Arc<dyn CrossSection> {
        Arc::clone(&self.section)
    }

    pub fn n(&self) -> usize {
        self.section.cone_dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub(crate) fn alpha(&self) -> f64 {
        0.5 * (self.n() as f64 - 2.0)
    }

    pub fn mu0(&self) -> f64 {
        self.section.block(0).expect("checked at construction").mu
    }

    /// `σ = (n−2)/2 − μ_0`.
    pub fn sigma(&self) -> f64 {
        self.alpha() - self.mu0()
    }

    /// `ln[(2t)^{−1} (rs)^{−(n−2)/2} e^{−(r−s)²/4t}]`.
    fn log_prefactor(&self, t: f64, r: f64, s: f64) -> f64 {
        -(2.0 * t).ln() - (r - s) * (r - s) / (4.0 * t) - self.alpha() * (r * s).ln()
    }

    fn check(t: f64, r: f64, s: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
        }
        check_radius(r)?;
        check_radius(s)?;
        Ok(r * s / (2.0 * t))
    }

    fn block_kernels(&self, y: &SectionPoint, y2: &SectionPoint, count: usize) -> Result<Vec<f64>> {
        let available = self.section.block_count().unwrap_or(usize::MAX);
        self.section.block_kernels(y, y2, count.min(available))
    }

    /// The certified series `Σ_k H_k(y,y') e^{−z} I_{μ_k}(z)`.
    ///
    /// Stops at the first `K` whose majorant tail is below
    /// `tol · |partial sum|`, or below the rounding level of the partial sum
    /// when cancellation makes that unreachable.
    pub fn series_sum(&self, z: f64, y: &SectionPoint, y2: &SectionPoint) -> Result<SeriesSum> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidArgument(format!("z must be positive, got {z}")));
        }
        let section = self.section.as_ref();
        let available = section.block_count().unwrap_or(usize::MAX);
        let log_scale = log_bessel_i_scaled(self.mu0(), z)?;
        let mut majorant = Majorant::new(section, z, log_scale);

        let mut kernels = self.block_kernels(y, y2, 32)?;
        let (mut sum, mut abs_sum) = (0.0f64, 0.0f64);
        let mut j = 0usize;
        loop {
            if j == available {
                return Ok(SeriesSum { log_scale, sum, abs_sum, blocks: j, tail: 0.0 });
            }
            if j == self.k_max {
                let tail = majorant.suffix(j, z);
                return Err(Error::TruncationFailure { blocks: j, tail_bound: tail / sum.abs() });
            }
            if j == kernels.len() {
                kernels = self.block_kernels(y, y2, (2 * j).min(self.k_max))?;
            }
            let mu = section.block(j).expect("block within count").mu;
            let term = kernels[j] * (log_bessel_i_scaled(mu, z)? - log_scale).exp();
            sum += term;
            abs_sum += term.abs();
            j += 1;

            let target = (self.tol * sum.abs()).max(f64::EPSILON * abs_sum);
            if majorant.get(j) <= target {
                let tail = majorant.suffix(j, z);
                if tail <= target {
                    return Ok(SeriesSum { log_scale, sum, abs_sum, blocks: j, tail });
                }
            }
        }
    }

    /// `K(t; p, q)` with its truncation certificate.
    pub fn evaluate_detailed(&self, t: f64, p: &ConePoint, q: &ConePoint) -> Result<KernelValue> {
        let z = Self::check(t, p.r, q.r)?;
        let series = self.series_sum(z, &p.y, &q.y)?;
        let unit = (self.log_prefactor(t, p.r, q.r) + series.log_scale).exp();
        Ok(KernelValue {
            value: unit * series.sum,
            blocks: series.blocks,
            tail_bound: unit * series.tail,
            rounding_floor: unit * 1e-13 * series.abs_sum,
        })
    }

    pub fn evaluate(&self, t: f64, p: &ConePoint, q: &ConePoint) -> Result<f64> {
        Ok(self.evaluate_detailed(t, p, q)?.value)
    }

    /// Section points realizing `d_h = dh`.
    pub fn points_at_distance(&self, dh: f64) -> Result<(SectionPoint, SectionPoint)> {
        self.section.points_at_distance(dh).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "section distance {dh} outside [0, {}]",
                self.section.diameter()
            ))
        })
    }

    /// `K` at radii `r, s` and section points realizing `d_h = dh`.
    pub fn evaluate_at(&self, g: &GridPoint) -> Result<KernelValue> {
        let (y, y2) = self.points_at_distance(g.dh)?;
        self.evaluate_detailed(g.t, &ConePoint::new(g.r, y)?, &ConePoint::new(g.s, y2)?)
    }

    /// [`evaluate_at`](Self::evaluate_at) over a grid in parallel; output
    /// order follows the input.
    pub fn evaluate_grid(&self, grid: &[GridPoint]) -> Vec<Result<KernelValue>> {
        grid.par_iter().map(|g| self.evaluate_at(g)).collect()
    }

    /// Per-block contributions `(2t)^{−1}e^{−(r²+s²)/4t}(rs)^{−(n−2)/2} H_j I_{μ_j}`
    /// for `j ∈ range`, in kernel units.
    pub fn block_terms(
        &self,
        t: f64,
        p: &ConePoint,
        q: &ConePoint,
        range: std::ops::Range<usize>,
    ) -> Result<Vec<f64>> {
        let z = Self::check(t, p.r, q.r)?;
        let log_pre = self.log_prefactor(t, p.r, q.r);
        let kernels = self.block_kernels(&p.y, &q.y, range.end)?;
        range
            .filter(|&j| j < kernels.len())
            .map(|j| {
                let mu = self.section.block(j).expect("block within count").mu;
                Ok(kernels[j] * (log_pre + log_bessel_i_scaled(mu, z)?).exp())
            })
            .collect()
    }

    /// The kernel with exactly the first `blocks` blocks.
    pub fn partial_sum(&self, t: f64, p: &ConePoint, q: &ConePoint, blocks: usize) -> Result<f64> {
        Ok(self.block_terms(t, p, q, 0..blocks)?.iter().sum())
    }

    /// Bound on `|Σ_{j ≥ K} (block j term)|` in kernel units; nonincreasing in `K`.
    pub fn truncation_tail(&self, blocks: usize, t: f64, p: &ConePoint, q: &ConePoint) -> Result<f64> {
        let z = Self::check(t, p.r, q.r)?;
        let log_pre = self.log_prefactor(t, p.r, q.r);
        let mut majorant = Majorant::new(self.section.as_ref(), z, 0.0);
        Ok((log_pre).exp() * majorant.suffix(blocks, z))
    }

    /// `C [min(1, rs/2t)]^{−σ} t^{−n/2} e^{−d²/(ct)}` from radii and `d_h`.
    pub fn gaussian_bound_parts(&self, t: f64, r: f64, s: f64, dh: f64, big_c: f64, c: f64) -> f64 {
        let z = r * s / (2.0 * t);
        let d = cone_distance_from_parts(r, s, dh);
        big_c * z.min(1.0).powf(-self.sigma()) * t.powf(-0.5 * self.n() as f64) * (-d * d / (c * t)).exp()
    }

    pub fn gaussian_bound(&self, t: f64, p: &ConePoint, q: &ConePoint, big_c: f64, c: f64) -> Result<f64> {
        Self::check(t, p.r, q.r)?;
        if !(big_c > 0.0 && c > 0.0) {
            return Err(Error::InvalidArgument(format!("bound constants must be positive (C = {big_c}, c = {c})")));
        }
        let dh = self.section.distance(&p.y, &q.y)?;
        Ok(self.gaussian_bound_parts(t, p.r, q.r, dh, big_c, c))
    }
}
