//! Cross-sections `(Y, h)` of the cone together with the spectral data of
//! `−Δ_h + V_0 + (n−2)²/4`.
//!
//! Spectral data is exposed per *block*: for the analytic sections a block is
//! a whole eigenspace (all spherical harmonics of one degree, or the
//! `cos`/`sin` pair of one circle frequency) and its kernel is the aggregated
//! projection kernel given by the addition theorem. For [`MatrixSection`]
//! every block is a single discrete eigenvector.

mod circle;
mod file;
mod jacobi;
mod matrix;
mod sphere;

pub use circle::CircleSection;
pub use file::{parse_spectral_file, read_spectral_file, SpectralFile};
pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use matrix::{MatrixSection, NodeMetric, Stencil};
pub use sphere::{gegenbauer_normalized, SphereSection};

use crate::error::{Error, Result};

/// One eigenpair `(k, λ_k, μ_k = √λ_k)`, multiplicities expanded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMode {
    pub index: usize,
    pub lambda: f64,
    pub mu: f64,
}

/// One eigenspace (or one discrete eigenvector) with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBlock {
    pub index: usize,
    pub lambda: f64,
    pub mu: f64,
    pub multiplicity: usize,
}

impl SpectralBlock {
    pub(crate) fn new(index: usize, lambda: f64, multiplicity: usize) -> Self {
        Self { index, lambda, mu: lambda.sqrt(), multiplicity }
    }
}

/// A point `y ∈ Y`; its meaning belongs to the owning section.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionPoint {
    /// Arc-length coordinate on a circle, in `[0, L)`.
    Angle(f64),
    /// Unit vector in `ℝⁿ` for `Sⁿ⁻¹`.
    Unit(Vec<f64>),
    /// Node index of a discretized section.
    Node(usize),
}

/// The closed cross-section and the spectral data the kernel series needs.
///
/// Implementations are immutable after construction and are shared across
/// threads by the kernel evaluator.
pub trait CrossSection: Send + Sync + std::fmt::Debug {
    /// Dimension `n` of the cone `C(Y)`; the section has dimension `n − 1`.
    fn cone_dim(&self) -> usize;

    /// Number of spectral blocks, `None` when infinite.
    fn block_count(&self) -> Option<usize>;

    /// The `j`-th block in nondecreasing eigenvalue order.
    fn block(&self, j: usize) -> Option<SpectralBlock>;

    /// Aggregated projection kernel `Σ φ(y) φ(y')` over block `j`.
    fn block_kernel(&self, j: usize, y: &SectionPoint, y2: &SectionPoint) -> Result<f64>;

    /// Kernels of blocks `0..count` at one point pair. Sections with a
    /// recurrence in the block index override this.
    fn block_kernels(&self, y: &SectionPoint, y2: &SectionPoint, count: usize) -> Result<Vec<f64>> {
        (0..count).map(|j| self.block_kernel(j, y, y2)).collect()
    }

    /// `B_j` with `|block_kernel(j, y, y')| ≤ B_j` for all `y, y'`.
    fn block_sup_bound(&self, j: usize) -> f64;

    /// Geodesic distance `d_h(y, y')`.
    fn distance(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64>;

    fn validate(&self, y: &SectionPoint) -> Result<()>;

    /// A point pair at section distance (as close as the section allows to)
    /// `delta`, or `None` when `delta` exceeds the diameter.
    fn points_at_distance(&self, delta: f64) -> Option<(SectionPoint, SectionPoint)>;

    /// Section quadrature with roughly `order` points per direction.
    fn quadrature(&self, order: usize) -> Vec<(SectionPoint, f64)>;

    /// Total measure of `Y`.
    fn volume(&self) -> f64;

    /// Largest attainable `d_h`.
    fn diameter(&self) -> f64;

    /// The `k`-th eigenpair with multiplicities expanded.
    fn mode(&self, k: usize) -> Result<SpectralMode> {
        let mut seen = 0usize;
        let mut j = 0usize;
        while let Some(block) = self.block(j) {
            if k < seen + block.multiplicity {
                return Ok(SpectralMode { index: k, lambda: block.lambda, mu: block.mu });
            }
            seen += block.multiplicity;
            j += 1;
        }
        Err(Error::IndexOutOfRange { index: k, available: seen })
    }

    /// Multiplicity-weighted sup bound of mode `k`, i.e. the bound of the
    /// block that contains it.
    fn mode_sup_bound(&self, k: usize) -> Result<f64> {
        let mut seen = 0usize;
        let mut j = 0usize;
        while let Some(block) = self.block(j) {
            if k < seen + block.multiplicity {
                return Ok(self.block_sup_bound(j));
            }
            seen += block.multiplicity;
            j += 1;
        }
        Err(Error::IndexOutOfRange { index: k, available: seen })
    }
}

pub(crate) fn invalid_point(section: &str, y: &SectionPoint) -> Error {
    Error::InvalidPoint(format!("{y:?} is not a point of the {section} section"))
}
