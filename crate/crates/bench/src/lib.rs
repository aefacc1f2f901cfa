//! Shared fixtures for the criterion benchmarks.

use std::f64::consts::PI;
use std::sync::Arc;

use conekernel::{CircleSection, GridPoint, HeatKernelEvaluator, SphereSection};

pub fn circle_evaluator() -> HeatKernelEvaluator {
    HeatKernelEvaluator::new(Arc::new(CircleSection::new(3.0 * PI, 1.0).unwrap())).unwrap()
}

pub fn sphere_evaluator() -> HeatKernelEvaluator {
    HeatKernelEvaluator::new(Arc::new(SphereSection::new(3, -0.125).unwrap())).unwrap()
}

/// Points spanning `rs/2t` from 1e-2 to 1e2.
pub fn sample_points() -> Vec<GridPoint> {
    (0..=8)
        .map(|i| {
            let z = 10f64.powf(-2.0 + 0.5 * i as f64);
            let r = (2.0 * z).sqrt();
            GridPoint { t: 1.0, r, s: r, dh: 0.3 * i as f64 % PI }
        })
        .collect()
}

/// Discrete periodic Laplacian `+ a` on `count` nodes, row-major.
pub fn ring_matrix(count: usize, a: f64) -> Vec<f64> {
    let h = 2.0 * PI / count as f64;
    let mut m = vec![0.0; count * count];
    for i in 0..count {
        m[i * count + i] = 2.0 / (h * h) + a;
        m[i * count + (i + 1) % count] -= 1.0 / (h * h);
        m[i * count + (i + count - 1) % count] -= 1.0 / (h * h);
    }
    m
}
