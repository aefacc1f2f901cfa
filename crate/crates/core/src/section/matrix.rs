use std::f64::consts::PI;

use super::jacobi::symmetric_eigen;
use super::{invalid_point, CrossSection, SectionPoint, SpectralBlock};
use crate::error::{Error, Result};

/// How node coordinates are turned into the section distance `d_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeMetric {
    /// Euclidean distance between coordinate vectors.
    Euclidean,
    /// First coordinate is arc length on a circle of this circumference.
    Periodic(f64),
}

/// Finite-difference stencil for [`MatrixSection::uniform_circle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    SecondOrder,
    /// Periodic Fourier (sinc) differentiation matrix; exact for every
    /// frequency below the Nyquist limit.
    Spectral,
}

/// A discretized section: nodes `y_i` with weights `w_i > 0` and a
/// symmetric matrix `A` representing `−Δ_h + V_0 + (n−2)²/4` in the
/// `w`-weighted inner product, i.e. `A = W^{1/2} L W^{−1/2}` for the nodal
/// operator `L`. Eigenvectors `v_k` of `A` give `φ_k(y_i) = v_{ik} / √w_i`,
/// orthonormal in `Σ_i w_i φ(y_i) ψ(y_i)`.
///
/// Every block is a single mode.
#[derive(Debug, Clone)]
pub struct MatrixSection {
    n: usize,
    coords: Vec<Vec<f64>>,
    weights: Vec<f64>,
    metric: NodeMetric,
    lambdas: Vec<f64>,
    /// Row-major `node × mode`.
    phi: Vec<f64>,
    sup: Vec<f64>,
    diameter: f64,
}

impl MatrixSection {
    /// Builds the section and its dense eigen-decomposition.
    ///
    /// `matrix` is row-major `count × count`.
    pub fn build(
        n: usize,
        coords: Vec<Vec<f64>>,
        weights: Vec<f64>,
        matrix: &[f64],
        metric: NodeMetric,
    ) -> Result<Self> {
        let count = weights.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!("cone dimension must be >= 2, got {n}")));
        }
        if count < 2 {
            return Err(Error::BadWeights(format!("need at least two nodes, got {count}")));
        }
        if coords.len() != count {
            return Err(Error::InvalidArgument(format!(
                "{} coordinate rows for {count} weights",
                coords.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::BadWeights(format!("weight {w} is not positive")));
        }
        if let NodeMetric::Periodic(l) = metric {
            if !(l > 0.0) || coords.iter().any(|c| c.is_empty()) {
                return Err(Error::InvalidArgument("periodic metric needs L > 0 and one coordinate".into()));
            }
        }
        if matrix.len() != count * count {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries, expected {count}x{count}",
                matrix.len()
            )));
        }
        let max_entry = matrix.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut asymmetry = 0.0f64;
        for i in 0..count {
            for j in 0..i {
                asymmetry = asymmetry.max((matrix[i * count + j] - matrix[j * count + i]).abs());
            }
        }
        if asymmetry > 1e-12 * max_entry.max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }

        let eig = symmetric_eigen(matrix, count)?;
        let spread = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lambda0 = eig.values[0];
        if !(lambda0 > 1e-12 * spread.max(1.0)) {
            return Err(Error::NonPositiveSpectrum { lambda0 });
        }

        let mut phi = vec![0.0; count * count];
        let mut sup = vec![0.0; count];
        for k in 0..count {
            let norm: f64 = (0..count)
                .map(|i| eig.vector_component(i, k).powi(2))
                .sum::<f64>()
                .sqrt();
            for i in 0..count {
                let value = eig.vector_component(i, k) / norm / weights[i].sqrt();
                phi[i * count + k] = value;
                sup[k] = f64::max(sup[k], value * value);
            }
        }

        let mut section = Self {
            n,
            coords,
            weights,
            metric,
            lambdas: eig.values,
            phi,
            sup,
            diameter: 0.0,
        };
        let mut diameter = 0.0f64;
        for i in 0..count {
            for j in 0..i {
                diameter = diameter.max(section.node_distance(i, j));
            }
        }
        section.diameter = diameter;
        Ok(section)
    }

    /// `−d²/dθ² + a` on `count` equispaced nodes of a circle of
    /// circumference `L` (cone dimension 2).
    pub fn uniform_circle(count: usize, circumference: f64, potential: f64, stencil: Stencil) -> Result<Self> {
        if count < 2 {
            return Err(Error::BadWeights(format!("need at least two nodes, got {count}")));
        }
        let h = circumference / count as f64;
        let mut matrix = vec![0.0; count * count];
        match stencil {
            Stencil::SecondOrder => {
                for i in 0..count {
                    matrix[i * count + i] += 2.0 / (h * h);
                    matrix[i * count + (i + 1) % count] -= 1.0 / (h * h);
                    matrix[i * count + (i + count - 1) % count] -= 1.0 / (h * h);
                }
            }
            Stencil::Spectral => {
                if count % 2 != 0 {
                    return Err(Error::InvalidArgument("spectral stencil needs an even node count".into()));
                }
                let scale = (2.0 * PI / circumference).powi(2);
                let hs = 2.0 * PI / count as f64;
                for i in 0..count {
                    for j in 0..count {
                        let k = (i + count - j) % count;
                        matrix[i * count + j] = if k == 0 {
                            scale * (PI * PI / (3.0 * hs * hs) + 1.0 / 6.0)
                        } else {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            scale * sign / (2.0 * (0.5 * k as f64 * hs).sin().powi(2))
                        };
                    }
                }
            }
        }
        for i in 0..count {
            matrix[i * count + i] += potential;
        }
        let coords = (0..count).map(|i| vec![i as f64 * h]).collect();
        Self::build(2, coords, vec![h; count], &matrix, NodeMetric::Periodic(circumference))
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambdas
    }

    /// `φ_k(y_i)`.
    pub fn eigenfunction(&self, k: usize, node: usize) -> f64 {
        self.phi[node * self.node_count() + k]
    }

    fn node(&self, y: &SectionPoint) -> Result<usize> {
        match *y {
            SectionPoint::Node(i) if i < self.node_count() => Ok(i),
            _ => Err(invalid_point("matrix", y)),
        }
    }

    fn node_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.coords[i], &self.coords[j]);
        match self.metric {
            NodeMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            NodeMetric::Periodic(l) => {
                let d = (a[0] - b[0]).rem_euclid(l);
                d.min(l - d)
            }
        }
    }
}

impl CrossSection for MatrixSection {
    fn cone_dim(&self) -> usize {
        self.n
    }

    fn block_count(&self) -> Option<usize> {
        Some(self.node_count())
    }

    fn block(&self, k: usize) -> Option<SpectralBlock> {
        self.lambdas.get(k).map(|&l| SpectralBlock::new(k, l, 1))
    }

    fn block_kernel(&self, k: usize, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        if k >= self.node_count() {
            return Err(Error::IndexOutOfRange { index: k, available: self.node_count() });
        }
        Ok(self.eigenfunction(k, self.node(y)?) * self.eigenfunction(k, self.node(y2)?))
    }

    fn block_sup_bound(&self, k: usize) -> f64 {
        self.sup.get(k).copied().unwrap_or(0.0)
    }

    fn distance(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        Ok(self.node_distance(self.node(y)?, self.node(y2)?))
    }

    fn validate(&self, y: &SectionPoint) -> Result<()> {
        self.node(y).map(|_| ())
    }

    /// Node 0 and the node whose distance from it is closest to `delta`.
    fn points_at_distance(&self, delta: f64) -> Option<(SectionPoint, SectionPoint)> {
        if !(delta >= 0.0) || delta > self.diameter * (1.0 + 1e-12) {
            return None;
        }
        let best = (0..self.node_count())
            .min_by(|&i, &j| {
                (self.node_distance(0, i) - delta)
                    .abs()
                    .total_cmp(&(self.node_distance(0, j) - delta).abs())
            })
            .unwrap_or(0);
        Some((SectionPoint::Node(0), SectionPoint::Node(best)))
    }

    fn quadrature(&self, _order: usize) -> Vec<(SectionPoint, f64)> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (SectionPoint::Node(i), w))
            .collect()
    }

    fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }
}
