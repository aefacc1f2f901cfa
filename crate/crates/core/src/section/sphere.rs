use std::f64::consts::PI;

use super::{invalid_point, CrossSection, SectionPoint, SpectralBlock};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special::log_gamma;

/// Normalized Gegenbauer polynomials `G_l = C_l^{(α)} / C_l^{(α)}(1)` for
/// `l = 0..count`, by the three-term recurrence
/// `(l + 2α) G_{l+1} = 2(l + α) x G_l − l G_{l−1}`.
pub fn gegenbauer_normalized(alpha: f64, x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(x);
    for l in 1..count - 1 {
        let lf = l as f64;
        let next = (2.0 * (lf + alpha) * x * out[l] - lf * out[l - 1]) / (lf + 2.0 * alpha);
        out.push(next);
    }
    out
}

/// The round sphere `Sⁿ⁻¹ ⊂ ℝⁿ` with constant potential `a`.
///
/// Block `l` is the space of degree-`l` spherical harmonics with eigenvalue
/// `l(l+n−2) + a + (n−2)²/4`; its kernel is `(m_l/ω_{n−1}) G_l(cos d_h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSection {
    n: usize,
    potential: f64,
    area: f64,
}

impl SphereSection {
    /// Cone dimension `n ≥ 3` and `a > −(n−2)²/4`.
    pub fn new(n: usize, potential: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("sphere section needs cone dimension n >= 3, got {n}")));
        }
        let shift = 0.25 * ((n - 2) * (n - 2)) as f64;
        if !potential.is_finite() || !(potential + shift > 0.0) {
            return Err(Error::NonPositiveSpectrum { lambda0: potential + shift });
        }
        let half = 0.5 * n as f64;
        let area = 2.0 * (half * PI.ln() - log_gamma(half)).exp();
        Ok(Self { n, potential, area })
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    fn alpha(&self) -> f64 {
        0.5 * (self.n as f64 - 2.0)
    }

    /// Dimension of the degree-`l` harmonics, `(2l+n−2)(l+n−3)! / (l!(n−2)!)`.
    pub fn multiplicity(&self, l: usize) -> usize {
        let n = self.n;
        // binom(l + n − 3, n − 3) (2l + n − 2) / (n − 2), exact in integers
        let mut binom: u128 = 1;
        for i in 1..=(n - 3) as u128 {
            binom = binom * (l as u128 + i) / i;
        }
        (binom * (2 * l + n - 2) as u128 / (n - 2) as u128) as usize
    }

    fn unit<'a>(&self, y: &'a SectionPoint) -> Result<&'a [f64]> {
        match y {
            SectionPoint::Unit(v) if v.len() == self.n => {
                let norm2: f64 = v.iter().map(|x| x * x).sum();
                if (norm2.sqrt() - 1.0).abs() <= 1e-12 {
                    Ok(v)
                } else {
                    Err(invalid_point("sphere", y))
                }
            }
            _ => Err(invalid_point("sphere", y)),
        }
    }

    fn cos_distance(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        Ok(self.distance(y, y2)?.cos())
    }

    /// Product quadrature on `S^{d}`, `d ≥ 1`: Gauss–Legendre in the polar
    /// angle (in `cos θ` for `d = 2`), trapezoid in the last azimuth.
    fn product_grid(d: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
        if d == 1 {
            let m = 2 * order;
            let w = 2.0 * PI / m as f64;
            return (0..m)
                .map(|j| {
                    let phi = j as f64 * w;
                    (vec![phi.cos(), phi.sin()], w)
                })
                .collect();
        }
        // in θ the integrand is a trig polynomial of twice the degree
        let gl = GaussLegendre::new(if d == 2 { order } else { 2 * order });
        let sub = Self::product_grid(d - 1, order);
        let mut out = Vec::with_capacity(order * sub.len());
        let polar: Vec<(f64, f64, f64)> = if d == 2 {
            gl.mapped(-1.0, 1.0)
                .map(|(x, w)| (x, (1.0 - x * x).sqrt(), w))
                .collect()
        } else {
            gl.mapped(0.0, PI)
                .map(|(t, w)| (t.cos(), t.sin(), w * t.sin().powi(d as i32 - 1)))
                .collect()
        };
        for &(c, s, w) in &polar {
            for (v, ws) in &sub {
                let mut p = Vec::with_capacity(d + 1);
                p.push(c);
                p.extend(v.iter().map(|x| s * x));
                out.push((p, w * ws));
            }
        }
        out
    }
}

impl CrossSection for SphereSection {
    fn cone_dim(&self) -> usize {
        self.n
    }

    fn block_count(&self) -> Option<usize> {
        None
    }

    fn block(&self, l: usize) -> Option<SpectralBlock> {
        let shifted = l as f64 + self.alpha();
        // l(l+n−2) + (n−2)²/4 = (l + (n−2)/2)²
        Some(SpectralBlock::new(l, shifted * shifted + self.potential, self.multiplicity(l)))
    }

    fn block_kernel(&self, l: usize, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        let x = self.cos_distance(y, y2)?;
        let g = gegenbauer_normalized(self.alpha(), x, l + 1)[l];
        Ok(self.multiplicity(l) as f64 / self.area * g)
    }

    fn block_kernels(&self, y: &SectionPoint, y2: &SectionPoint, count: usize) -> Result<Vec<f64>> {
        let x = self.cos_distance(y, y2)?;
        Ok(gegenbauer_normalized(self.alpha(), x, count)
            .into_iter()
            .enumerate()
            .map(|(l, g)| self.multiplicity(l) as f64 / self.area * g)
            .collect())
    }

    fn block_sup_bound(&self, l: usize) -> f64 {
        self.multiplicity(l) as f64 / self.area
    }

    fn distance(&self, y: &SectionPoint, y2: &SectionPoint) -> Result<f64> {
        let u = self.unit(y)?;
        let v = self.unit(y2)?;
        let (mut diff, mut sum) = (0.0, 0.0);
        for (a, b) in u.iter().zip(v) {
            diff += (a - b) * (a - b);
            sum += (a + b) * (a + b);
        }
        Ok(2.0 * diff.sqrt().atan2(sum.sqrt()))
    }

    fn validate(&self, y: &SectionPoint) -> Result<()> {
        self.unit(y).map(|_| ())
    }

    fn points_at_distance(&self, delta: f64) -> Option<(SectionPoint, SectionPoint)> {
        if !(0.0..=PI).contains(&delta) {
            return None;
        }
        let mut pole = vec![0.0; self.n];
        pole[0] = 1.0;
        let mut other = vec![0.0; self.n];
        other[0] = delta.cos();
        other[1] = delta.sin();
        Some((SectionPoint::Unit(pole), SectionPoint::Unit(other)))
    }

    fn quadrature(&self, order: usize) -> Vec<(SectionPoint, f64)> {
        Self::product_grid(self.n - 1, order.max(1))
            .into_iter()
            .map(|(p, w)| (SectionPoint::Unit(p), w))
            .collect()
    }

    fn volume(&self) -> f64 {
        self.area
    }

    fn diameter(&self) -> f64 {
        PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_of_three_cone() {
        let s = SphereSection::new(3, 0.0).unwrap();
        let m = s.mode(0).unwrap();
        assert_eq!(m.lambda, 0.25);
        assert_eq!(m.mu, 0.5);
        let s = SphereSection::new(4, 0.0).unwrap();
        // degree 1 on S³: 1·3 + 1 = 4, modes 1..=4
        assert_eq!(s.mode(1).unwrap().lambda, 4.0);
        assert_eq!(s.mode(4).unwrap().mu, 2.0);
        assert_eq!(s.mode(5).unwrap().lambda, 9.0);
    }

    #[test]
    fn rejects_potential_below_hardy_threshold() {
        assert!(SphereSection::new(3, -0.25).is_err());
        assert!(SphereSection::new(3, -0.2499).is_ok());
        assert!(SphereSection::new(2, 1.0).is_err());
    }

    #[test]
    fn multiplicities() {
        let s3 = SphereSection::new(3, 0.0).unwrap();
        assert_eq!((0..5).map(|l| s3.multiplicity(l)).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        let s4 = SphereSection::new(4, 0.0).unwrap();
        assert_eq!((0..4).map(|l| s4.multiplicity(l)).collect::<Vec<_>>(), vec![1, 4, 9, 16]);
        let s5 = SphereSection::new(5, 0.0).unwrap();
        // (2l+3)(l+2)(l+1)/6
        assert_eq!((0..4).map(|l| s5.multiplicity(l)).collect::<Vec<_>>(), vec![1, 5, 14, 30]);
    }

    #[test]
    fn area_of_spheres() {
        assert!((SphereSection::new(3, 0.0).unwrap().volume() - 4.0 * PI).abs() < 1e-13);
        assert!((SphereSection::new(4, 0.0).unwrap().volume() - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn gegenbauer_matches_legendre_and_chebyshev_u() {
        let x = 0.37;
        let p = gegenbauer_normalized(0.5, x, 4);
        assert!((p[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        // α = 1: C_l^{(1)} = U_l, U_l(1) = l + 1
        let theta = x.acos();
        let u = gegenbauer_normalized(1.0, x, 6);
        for (l, g) in u.iter().enumerate() {
            let exact = ((l as f64 + 1.0) * theta).sin() / theta.sin() / (l as f64 + 1.0);
            assert!((g - exact).abs() < 1e-14);
        }
        for &g in &gegenbauer_normalized(1.5, -0.999, 60) {
            assert!(g.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn addition_theorem_degree_one() {
        // Explicit real degree-1 harmonics on S²: √(3/4π) x_i
        let s = SphereSection::new(3, 0.0).unwrap();
        let (p, q) = s.points_at_distance(1.1).unwrap();
        let (SectionPoint::Unit(u), SectionPoint::Unit(v)) = (&p, &q) else { unreachable!() };
        let explicit: f64 = u.iter().zip(v).map(|(a, b)| 3.0 / (4.0 * PI) * a * b).sum();
        assert!((s.block_kernel(1, &p, &q).unwrap() - explicit).abs() < 1e-15);
        assert!((s.block_kernel(1, &p, &p).unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((s.block_sup_bound(4) - 9.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_kernel_sum_is_positive() {
        for n in 3..6 {
            let s = SphereSection::new(n, 0.3).unwrap();
            let (p, _) = s.points_at_distance(0.0).unwrap();
            let total: f64 = s.block_kernels(&p, &p, 21).unwrap().iter().sum();
            assert!(total > 0.0);
        }
    }

    #[test]
    fn quadrature_integrates_harmonics() {
        for n in 3..6 {
            let s = SphereSection::new(n, 0.0).unwrap();
            let q = s.quadrature(10);
            let total: f64 = q.iter().map(|(_, w)| w).sum();
            assert!((total - s.volume()).abs() < 1e-10 * s.volume(), "n={n}");
            // ∫ x_0² = |S| / n
            let second: f64 = q
                .iter()
                .map(|(p, w)| match p {
                    SectionPoint::Unit(v) => w * v[0] * v[0],
                    _ => unreachable!(),
                })
                .sum();
            assert!((second - s.volume() / n as f64).abs() < 1e-10, "n={n}: {second} vs {}", s.volume() / n as f64);
        }
    }

    #[test]
    fn distance_is_accurate_near_zero_and_pi() {
        let s = SphereSection::new(3, 0.0).unwrap();
        for &d in &[1e-9, 0.5, PI - 1e-9, PI] {
            let (p, q) = s.points_at_distance(d).unwrap();
            assert!((s.distance(&p, &q).unwrap() - d).abs() < 1e-15);
        }
        assert!(s.points_at_distance(3.2).is_none());
        assert!(s.validate(&SectionPoint::Unit(vec![1.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn weyl_growth() {
        for n in 3..5 {
            let s = SphereSection::new(n, 0.0).unwrap();
            for k in 0..=200 {
                let ratio = s.mode(k).unwrap().lambda * (1.0 + k as f64).powf(-2.0 / (n as f64 - 1.0));
                assert!(ratio > 0.1 && ratio < 10.0, "n={n} k={k}: {ratio}");
            }
        }
    }
}
