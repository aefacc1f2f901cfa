use crate::error::{Error, Result};

/// Eigen-decomposition of a dense symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Row-major `n × n`; column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl SymmetricEigen {
    pub fn vector_component(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.dim + k]
    }
}

/// Cyclic Jacobi rotations on a row-major symmetric matrix.
///
/// Sweeps visit every off-diagonal pair; pairs below a sweep-dependent
/// threshold are skipped (Rutishauser's variant). Converges quadratically
/// once the off-diagonal mass is small.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> Result<SymmetricEigen> {
    if matrix.len() != dim * dim {
        return Err(Error::InvalidArgument(format!(
            "matrix has {} entries, expected {dim}x{dim}",
            matrix.len()
        )));
    }
    const MAX_SWEEPS: usize = 60;
    let n = dim;
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        let scale: f64 = d.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-15 * scale || off == 0.0 {
            return Ok(sorted(d, v, n));
        }
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 { -t } else { t }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                let rotate = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize| {
                    let g = a[i * n + j];
                    let h = a[k * n + l];
                    a[i * n + j] = g - s * (h + g * tau);
                    a[k * n + l] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    Err(Error::NonConvergence { routine: "cyclic Jacobi", estimate: f64::NAN })
}

fn sorted(values: Vec<f64>, vectors: Vec<f64>, n: usize) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out_v = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for row in 0..n {
            out_v[row * n + new] = vectors[row * n + old];
        }
    }
    SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: out_v,
        dim: n,
    }
}
