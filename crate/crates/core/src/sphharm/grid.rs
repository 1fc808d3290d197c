use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_traits::Zero;

use super::{rotation_matrix, Direction, EulerAngles};
use crate::{Error, Mat3, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
///
/// Newton iteration on the Legendre three-term recurrence; exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
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
    (nodes, weights)
}

/// Product grid on S^2: Gauss-Legendre in cos(theta), trapezoid in phi.
///
/// `SphereGrid::new(band)` integrates exactly every polynomial in the
/// direction components of total degree `<= 2 band + 1`; in particular any
/// product of two functions of harmonic degree `<= band`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    band: usize,
    nodes: Vec<Direction>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(band: usize) -> Self {
        let (xs, ws) = gauss_legendre(band + 1);
        let n_phi = 2 * band + 2;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(xs.len() * n_phi);
        let mut weights = Vec::with_capacity(xs.len() * n_phi);
        for (&x, &w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                nodes.push(Direction::from_angles(theta, j as f64 * dphi));
                weights.push(w * dphi);
            }
        }
        SphereGrid { band, nodes, weights }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Errors unless the grid is exact for integrands of degree `degree`.
    pub fn require_degree(&self, degree: usize) -> Result<()> {
        check_degree(self.band, degree)
    }

    /// Quadrature of `f` in node order.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: Zero + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(&Direction) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (d, &w)| acc + f(d) * w)
    }
}

/// Product grid on SO(3), normalized so that the weights sum to one.
///
/// Trapezoid in alpha and gamma, Gauss-Legendre in cos(beta).
/// `EulerGrid::new(band)` averages exactly every Wigner function `D^j`
/// with `j <= 2 band + 1`, i.e. every polynomial of that degree in the
/// rotation-matrix entries.
#[derive(Debug, Clone)]
pub struct EulerGrid {
    band: usize,
    nodes: Vec<EulerAngles>,
    rotations: Vec<Mat3>,
    weights: Vec<f64>,
}

impl EulerGrid {
    pub fn new(band: usize) -> Self {
        let (xs, ws) = gauss_legendre(band + 1);
        let n_ang = 2 * band + 2;
        let d = 2.0 * PI / n_ang as f64;
        let norm = 1.0 / (2.0 * (n_ang * n_ang) as f64);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for ia in 0..n_ang {
            for (&x, &w) in xs.iter().zip(&ws) {
                let beta = x.clamp(-1.0, 1.0).acos();
                for ig in 0..n_ang {
                    nodes.push(EulerAngles::new(ia as f64 * d, beta, ig as f64 * d));
                    weights.push(w * norm);
                }
            }
        }
        let rotations = nodes.iter().map(rotation_matrix).collect();
        EulerGrid {
            band,
            nodes,
            rotations,
            weights,
        }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn nodes(&self) -> &[EulerAngles] {
        &self.nodes
    }

    pub fn rotations(&self) -> &[Mat3] {
        &self.rotations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Errors unless the grid is exact for rotation polynomials of degree `degree`.
    pub fn require_degree(&self, degree: usize) -> Result<()> {
        check_degree(self.band, degree)
    }

    /// Orientation average of `f` in node order.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: Zero + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(&Mat3) -> T,
    {
        self.rotations
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (r, &w)| acc + f(r) * w)
    }
}

fn check_degree(band: usize, degree: usize) -> Result<()> {
    if 2 * band + 1 < degree {
        return Err(Error::InsufficientBand {
            have: band,
            need: degree.saturating_sub(1).div_ceil(2),
        });
    }
    Ok(())
}

fn weighted_sum<T>(samples: &[T], weights: &[f64]) -> Result<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
{
    if samples.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            got: samples.len(),
        });
    }
    Ok(samples
        .iter()
        .zip(weights)
        .fold(T::zero(), |acc, (&s, &w)| acc + s * w))
}

/// Weighted sum of per-node samples over a sphere grid, in node order.
pub fn integrate_sphere<T>(samples: &[T], grid: &SphereGrid) -> Result<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
{
    weighted_sum(samples, grid.weights())
}

/// Weighted sum of per-node samples over an Euler grid, in node order.
pub fn integrate_euler<T>(samples: &[T], grid: &EulerGrid) -> Result<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
{
    weighted_sum(samples, grid.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphharm::HarmonicTable;
    use crate::Vec3;
    use num_complex::Complex64;

    #[test]
    fn gauss_legendre_small_orders() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        // exact for x^(2n-1) and x^(2n-2)
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            let p = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
            assert!((s - 2.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn sphere_weights_sum_to_four_pi() {
        for band in 0..8 {
            let g = SphereGrid::new(band);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 4.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_grid_orthonormality() {
        let band = 5;
        let g = SphereGrid::new(band);
        let tables: Vec<_> = g.nodes().iter().map(|d| HarmonicTable::new(band, d)).collect();
        for l in 0..=band {
            for m in -(l as i32)..=(l as i32) {
                for l2 in 0..=band {
                    for m2 in -(l2 as i32)..=(l2 as i32) {
                        let samples: Vec<Complex64> = tables
                            .iter()
                            .map(|t| t.get(l, m).conj() * t.get(l2, m2))
                            .collect();
                        let v = integrate_sphere(&samples, &g).unwrap();
                        let expect = if l == l2 && m == m2 { 1.0 } else { 0.0 };
                        assert!((v - expect).norm() < 1e-12, "({l},{m}) ({l2},{m2})");
                    }
                }
            }
        }
    }

    #[test]
    fn single_harmonic_integrals() {
        let band = 6;
        let g = SphereGrid::new(band);
        for l in 0..=(2 * band + 1) {
            for m in -(l as i32)..=(l as i32) {
                let v: Complex64 = g.integrate(|d| HarmonicTable::new(l, d).get(l, m));
                let expect = if l == 0 { (4.0 * PI).sqrt() } else { 0.0 };
                assert!((v - expect).norm() < 1e-12, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn y32_normalized_on_band_four() {
        let g = SphereGrid::new(4);
        let v: f64 = g.integrate(|d| HarmonicTable::new(3, d).get(3, 2).norm_sqr());
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn band_zero_is_single_ring() {
        let g = SphereGrid::new(0);
        assert_eq!(g.len(), 2);
        assert!((g.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn euler_weights_sum_to_one() {
        for band in 0..6 {
            let g = EulerGrid::new(band);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_rank_two_average() {
        let g = EulerGrid::new(4);
        let pairs = [
            (Vec3::x(), Vec3::x()),
            (Vec3::z(), Vec3::new(0.6, 0.0, 0.8)),
            (Vec3::new(1.0, 2.0, -2.0) / 3.0, Vec3::new(0.0, -0.6, 0.8)),
        ];
        for (u, v) in pairs {
            let avg: f64 = g.integrate(|r| (r * u).dot(&v).powi(2));
            assert!((avg - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotated_sphere_integral_invariant() {
        // band-limited f(k) = |Y_{3,1}(k)|^2 Re Y_{2,2}(k): degree 8, band 4 grid exact
        let g = SphereGrid::new(4);
        let f = |d: &Direction| {
            let t = HarmonicTable::new(3, d);
            t.get(3, 1).norm_sqr() * t.get(2, 2).re
        };
        let base: f64 = g.integrate(f);
        let r = rotation_matrix(&EulerAngles::new(0.7, 2.1, -1.3));
        let rotated: f64 = g.integrate(|d| f(&d.rotated(&r)));
        assert!((base - rotated).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = SphereGrid::new(2);
        assert!(matches!(
            integrate_sphere(&[1.0, 2.0], &g),
            Err(Error::LengthMismatch { .. })
        ));
        let e = EulerGrid::new(1);
        assert!(integrate_euler(&vec![1.0; e.len() + 1], &e).is_err());
        let ones = vec![1.0; e.len()];
        assert!((integrate_euler(&ones, &e).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_requirements() {
        let g = SphereGrid::new(3);
        assert!(g.require_degree(7).is_ok());
        assert!(matches!(
            g.require_degree(8),
            Err(Error::InsufficientBand { have: 3, need: 4 })
        ));
    }
}
