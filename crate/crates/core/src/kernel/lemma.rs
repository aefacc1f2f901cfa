//! Empirical constants for the bounds on
//! `F(z, δ) = z^{−(n−2)/2} |Σ_k H_k(y,y') I_{μ_k}(z)|`, `δ = d_h(y,y')`:
//!
//! ```text
//! z ≤ 1:  F ≤ C z^{−σ} e^{z cos δ}   (δ ≤ π),    F ≤ C z^{−σ}   (δ ≥ π)
//! z > 1:  F ≤ C (e^{z cos δ} + z^N e^{z cos(ε₀/2)})   (δ ≤ ε₀/2)
//!         F ≤ C z^N e^{z cos δ}                       (ε₀/2 ≤ δ ≤ π)
//!         F ≤ C e^{z/2}                               (δ ≥ π)
//! ```

use rayon::prelude::*;
use serde::Serialize;

use super::HeatKernelEvaluator;
use crate::error::{Error, Result};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaOptions {
    /// Branch boundary `ε₀ ∈ (0, π]` of the large-z bound.
    pub epsilon0: f64,
    /// Largest power `N` tried; `None` means `2n`.
    pub n_max: Option<usize>,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self { epsilon0: PI, n_max: None }
    }
}

/// Smallest constant making one branch hold on the sampled points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchFit {
    pub constant: f64,
    pub worst_z: f64,
    pub worst_delta: f64,
    pub points: usize,
}

/// Large-z constant for one `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C")]
    pub constant: f64,
}

/// One evaluated `(z, δ)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaSample {
    pub z: f64,
    pub delta: f64,
    pub log_f: f64,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub sigma: f64,
    pub epsilon0: f64,
    pub small_z: Option<BranchFit>,
    pub small_z_beyond_pi: Option<BranchFit>,
    pub large_z: Vec<PowerFit>,
    pub large_z_beyond_pi: Option<BranchFit>,
    pub best_n: Option<PowerFit>,
    pub unresolved: usize,
    #[serde(skip)]
    pub samples: Vec<LemmaSample>,
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

struct Accumulator {
    fit: Option<BranchFit>,
}

impl Accumulator {
    fn new() -> Self {
        Self { fit: None }
    }

    fn push(&mut self, log_ratio: f64, z: f64, delta: f64) {
        let value = log_ratio.exp();
        match &mut self.fit {
            None => self.fit = Some(BranchFit { constant: value, worst_z: z, worst_delta: delta, points: 1 }),
            Some(f) => {
                f.points += 1;
                if value > f.constant {
                    f.constant = value;
                    f.worst_z = z;
                    f.worst_delta = delta;
                }
            }
        }
    }
}

/// Fits the constants on the grid `z_grid × delta_grid`. Samples whose
/// series is dominated by cancellation noise are excluded and counted.
pub fn lemma_key_check(
    ev: &HeatKernelEvaluator,
    z_grid: &[f64],
    delta_grid: &[f64],
    options: LemmaOptions,
) -> Result<LemmaReport> {
    if !(options.epsilon0 > 0.0 && options.epsilon0 <= PI) {
        return Err(Error::InvalidArgument(format!("epsilon0 must lie in (0, pi], got {}", options.epsilon0)));
    }
    if z_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::InvalidArgument("lemma check needs nonempty z and delta grids".into()));
    }
    let alpha = ev.alpha();
    let sigma = ev.sigma();
    let pairs: Vec<(f64, f64)> = z_grid
        .iter()
        .flat_map(|&z| delta_grid.iter().map(move |&d| (z, d)))
        .collect();
    let samples = pairs
        .par_iter()
        .map(|&(z, delta)| {
            let (y, y2) = ev.points_at_distance(delta)?;
            let series = ev.series_sum(z, &y, &y2)?;
            let log_f = -alpha * z.ln() + z + series.log_scale + series.sum.abs().ln();
            let resolved = 1e-13 * series.abs_sum <= 1e-2 * series.sum.abs();
            Ok(LemmaSample { z, delta, log_f, resolved })
        })
        .collect::<Result<Vec<_>>>()?;

    let n_max = options.n_max.unwrap_or(2 * ev.n());
    let half_eps = 0.5 * options.epsilon0;
    let mut small = Accumulator::new();
    let mut small_beyond = Accumulator::new();
    let mut large_beyond = Accumulator::new();
    let mut large: Vec<Accumulator> = (0..=n_max).map(|_| Accumulator::new()).collect();
    let mut unresolved = 0;
    for s in &samples {
        if !s.resolved {
            unresolved += 1;
            continue;
        }
        let (z, delta) = (s.z, s.delta);
        if z <= 1.0 {
            if delta <= PI {
                small.push(s.log_f + sigma * z.ln() - z * delta.cos(), z, delta);
            }
            if delta >= PI {
                small_beyond.push(s.log_f + sigma * z.ln(), z, delta);
            }
        } else if delta >= PI {
            large_beyond.push(s.log_f - 0.5 * z, z, delta);
        } else {
            for (n, acc) in large.iter_mut().enumerate() {
                let log_power = n as f64 * z.ln();
                let log_g = if delta <= half_eps {
                    log_add(z * delta.cos(), log_power + z * half_eps.cos())
                } else {
                    log_power + z * delta.cos()
                };
                acc.push(s.log_f - log_g, z, delta);
            }
        }
    }
    let large_z: Vec<PowerFit> = large
        .iter()
        .enumerate()
        .filter_map(|(n, acc)| acc.fit.map(|f| PowerFit { n, constant: f.constant }))
        .collect();
    let best_n = large_z
        .iter()
        .copied()
        .fold(None, |best: Option<PowerFit>, f| match best {
            Some(b) if b.constant <= f.constant => Some(b),
            _ => Some(f),
        });
    Ok(LemmaReport {
        sigma,
        epsilon0: options.epsilon0,
        small_z: small.fit,
        small_z_beyond_pi: small_beyond.fit,
        large_z,
        large_z_beyond_pi: large_beyond.fit,
        best_n,
        unresolved,
        samples,
    })
}
