//! Quadrature rules shared by the special functions, the oracles and the
//! cone integrator.
//!
//! * [`GaussLegendre`]: fixed-order rule, nodes found by Newton iteration.
//! * [`adaptive_gauss_kronrod`]: globally adaptive 7/15-point Gauss–Kronrod.
//! * [`tanh_sinh`]: double-exponential rule on `[-1, 1]` for integrands with
//!   algebraic endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 15;
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= max_segments {
            return Err(Error::NonConvergence {
                routine: "adaptive Gauss-Kronrod",
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution.
            heap.push(worst);
            return Err(Error::NonConvergence {
                routine: "adaptive Gauss-Kronrod",
                estimate: total_err,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Resum to shed accumulated cancellation in the running totals.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Integral { value, error, evaluations })
}

/// Tanh–sinh quadrature of `f` over `[-1, 1]`.
///
/// The integrand receives `(x, c)` where `c = 1 - |x|` is computed without
/// cancellation, so factors like `(1 - x²)^p` with `p < 0` stay accurate
/// near the endpoints. Levels halve the step until two successive estimates
/// differ by less than `rel_tol` times the L¹ mass of the integrand.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, rel_tol: f64, max_level: usize) -> Result<Integral> {
    use std::f64::consts::FRAC_PI_2;

    // Contribution of the symmetric pair ±u (or the centre when u = 0).
    let pair = |u: f64| -> (f64, f64, bool) {
        let v = FRAC_PI_2 * u.sinh();
        let cosh_v = v.cosh();
        // 1 - tanh(v) = e^{-v} / cosh(v)
        let c = (-v).exp() / cosh_v;
        let w = FRAC_PI_2 * u.cosh() / (cosh_v * cosh_v);
        if !(c > 1e-300) || !w.is_finite() || w == 0.0 {
            return (0.0, 0.0, true);
        }
        let x = 1.0 - c;
        let fp = f(x, c);
        let fm = f(-x, c);
        let s = w * (fp + fm);
        let m = w * (fp.abs() + fm.abs());
        (s, m, false)
    };

    let f0 = f(0.0, 1.0);
    let mut h = 1.0_f64;
    let mut sum = FRAC_PI_2 * f0;
    let mut mass = FRAC_PI_2 * f0.abs();
    let mut evaluations = 1;

    let mut accumulate = |start: usize, stride: usize, h: f64, sum: &mut f64, mass: &mut f64| {
        let mut k = start;
        let mut quiet = 0;
        loop {
            let u = k as f64 * h;
            let (s, m, stop) = pair(u);
            evaluations += 2;
            *sum += s;
            *mass += m;
            if stop {
                break;
            }
            // Terms beyond u ≈ 6.5 are below the double-precision floor.
            if m <= 1e-18 * mass.abs() {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += stride;
            if u > 7.0 {
                break;
            }
        }
    };

    accumulate(1, 1, h, &mut sum, &mut mass);
    let mut estimate = h * sum;
    let mut error = f64::INFINITY;
    for _ in 0..max_level {
        h *= 0.5;
        accumulate(1, 2, h, &mut sum, &mut mass);
        let next = h * sum;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * h * mass {
            return Ok(Integral { value: estimate, error, evaluations });
        }
    }
    Err(Error::NonConvergence { routine: "tanh-sinh", estimate: error })
}
