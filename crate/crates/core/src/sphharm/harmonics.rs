use std::f64::consts::PI;

use num_complex::Complex64;

use super::Direction;
use crate::{CVec3, Error, Result};

/// Flat index of `(l, m)` in tables ordered by `l`, then `m = -l..=l`.
#[inline]
pub fn lm_index(l: usize, m: i32) -> usize {
    ((l * l + l) as isize + m as isize) as usize
}

fn check_lm(l: usize, m: i32) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidLm { l, m });
    }
    Ok(())
}

/// All `Y_{l,m}` with `l <= lmax` at one direction.
///
/// The associated Legendre part is built with the fully normalized
/// three-term recurrence, so no factorials appear and the table is stable
/// well past the degrees used here.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    lmax: usize,
    dir: Direction,
    values: Vec<Complex64>,
}

impl HarmonicTable {
    pub fn new(lmax: usize, dir: &Direction) -> Self {
        let v = dir.vec();
        let ct = v.z;
        let st = v.x.hypot(v.y);
        let eiphi = if st > 0.0 {
            Complex64::new(v.x / st, v.y / st)
        } else {
            Complex64::new(1.0, 0.0)
        };

        // normalized P_l^m(cos theta) including the Condon-Shortley phase, m >= 0
        let mut plm = vec![0.0; lm_index(lmax, lmax as i32) + 1];
        plm[0] = 0.5 / PI.sqrt();
        for m in 1..=lmax {
            let mf = m as f64;
            plm[lm_index(m, m as i32)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt()
                * st
                * plm[lm_index(m - 1, m as i32 - 1)];
        }
        for m in 0..lmax {
            let mf = m as f64;
            plm[lm_index(m + 1, m as i32)] =
                (2.0 * mf + 3.0).sqrt() * ct * plm[lm_index(m, m as i32)];
        }
        for m in 0..=lmax {
            let mi = m as i32;
            let mf = m as f64;
            for l in (m + 2)..=lmax {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lp = lf - 1.0;
                let b = ((lp * lp - mf * mf) / (4.0 * lp * lp - 1.0)).sqrt();
                plm[lm_index(l, mi)] =
                    a * (ct * plm[lm_index(l - 1, mi)] - b * plm[lm_index(l - 2, mi)]);
            }
        }

        let mut values = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
        let mut phase = Complex64::new(1.0, 0.0);
        for m in 0..=lmax {
            let mi = m as i32;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for l in m..=lmax {
                let y = phase * plm[lm_index(l, mi)];
                values[lm_index(l, mi)] = y;
                if m > 0 {
                    values[lm_index(l, -mi)] = y.conj() * sign;
                }
            }
            phase *= eiphi;
        }

        HarmonicTable { lmax, dir: *dir, values }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn direction(&self) -> &Direction {
        &self.dir
    }

    /// `Y_{l,m}`; zero outside the table (`l > lmax` or `|m| > l`).
    #[inline]
    pub fn get(&self, l: usize, m: i32) -> Complex64 {
        if l > self.lmax || m.unsigned_abs() as usize > l {
            return Complex64::new(0.0, 0.0);
        }
        self.values[lm_index(l, m)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `L Y_{l,m}` with `L = -i r x grad`, from the ladder operators.
    fn angular_momentum(&self, l: usize, m: i32) -> CVec3 {
        let lf = l as f64;
        let mf = m as f64;
        let up = (lf * (lf + 1.0) - mf * (mf + 1.0)).max(0.0).sqrt();
        let down = (lf * (lf + 1.0) - mf * (mf - 1.0)).max(0.0).sqrt();
        let lplus = self.get(l, m + 1) * up;
        let lminus = self.get(l, m - 1) * down;
        let i = Complex64::i();
        CVec3::new(
            (lplus + lminus) * 0.5,
            (lplus - lminus) / (i * 2.0),
            self.get(l, m) * mf,
        )
    }

    /// `(k x grad) Y_{l,m}` on the unit sphere, equal to `i L Y_{l,m}`.
    ///
    /// Requires `l <= lmax`.
    pub fn rot(&self, l: usize, m: i32) -> CVec3 {
        self.angular_momentum(l, m) * Complex64::i()
    }

    /// Surface gradient of `Y_{l,m}` on the unit sphere, `-k x (k x grad) Y`.
    ///
    /// Built from ladder operators, so it is regular at the poles.
    pub fn grad(&self, l: usize, m: i32) -> CVec3 {
        let k = crate::complexify(&self.dir.vec());
        -k.cross(&self.rot(l, m))
    }
}

/// Complex spherical harmonic `Y_{l,m}(dir)` with the Condon-Shortley phase.
pub fn ylm(l: usize, m: i32, dir: &Direction) -> Result<Complex64> {
    check_lm(l, m)?;
    Ok(HarmonicTable::new(l, dir).get(l, m))
}

/// Surface gradient of `Y_{l,m}` on the unit sphere (no radial component).
pub fn grad_ylm(l: usize, m: i32, dir: &Direction) -> Result<CVec3> {
    check_lm(l, m)?;
    Ok(HarmonicTable::new(l, dir).grad(l, m))
}

/// Rotational companion `k x grad Y_{l,m}`.
pub fn rot_ylm(l: usize, m: i32, dir: &Direction) -> Result<CVec3> {
    check_lm(l, m)?;
    Ok(HarmonicTable::new(l, dir).rot(l, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec3;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Unnormalized associated Legendre P_l^m(x), m >= 0, from the explicit
    /// Rodrigues-type closed forms for l <= 3 (Condon-Shortley phase).
    fn legendre_explicit(l: usize, m: usize, x: f64) -> f64 {
        let s = (1.0 - x * x).sqrt();
        match (l, m) {
            (0, 0) => 1.0,
            (1, 0) => x,
            (1, 1) => -s,
            (2, 0) => 0.5 * (3.0 * x * x - 1.0),
            (2, 1) => -3.0 * x * s,
            (2, 2) => 3.0 * s * s,
            (3, 0) => 0.5 * (5.0 * x * x * x - 3.0 * x),
            (3, 1) => -1.5 * (5.0 * x * x - 1.0) * s,
            (3, 2) => 15.0 * x * s * s,
            (3, 3) => -15.0 * s * s * s,
            _ => unreachable!(),
        }
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn ylm_explicit(l: usize, m: i32, theta: f64, phi: f64) -> Complex64 {
        let am = m.unsigned_abs() as usize;
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
        let y = Complex64::from_polar(norm * legendre_explicit(l, am, theta.cos()), am as f64 * phi);
        if m >= 0 {
            y
        } else if am % 2 == 0 {
            y.conj()
        } else {
            -y.conj()
        }
    }

    #[test]
    fn constant_harmonic() {
        let d = Direction::from_angles(0.4, 2.0);
        let y = ylm(0, 0, &d).unwrap();
        assert!(close(y, Complex64::new(0.282_094_791_773_878_14, 0.0), 1e-15));
    }

    #[test]
    fn y10_at_north_pole() {
        let y = ylm(1, 0, &Direction::Z).unwrap();
        assert!(close(y, Complex64::new(0.488_602_511_902_919_9, 0.0), 1e-15));
    }

    #[test]
    fn y21_matches_explicit_legendre_table() {
        let (theta, phi) = (PI / 3.0, PI / 4.0);
        let d = Direction::from_angles(theta, phi);
        let y = ylm(2, 1, &d).unwrap();
        // -sqrt(15/8pi) sin cos e^{i phi}
        let frozen = Complex64::from_polar(
            -(15.0 / (8.0 * PI)).sqrt() * theta.sin() * theta.cos(),
            phi,
        );
        assert!(close(y, frozen, 1e-14));
        assert!(close(y, ylm_explicit(2, 1, theta, phi), 1e-14));
    }

    #[test]
    fn whole_table_matches_explicit_forms() {
        for &(theta, phi) in &[(0.3, 0.1), (1.7, -2.2), (2.9, 4.0), (0.0, 0.0), (PI, 1.0)] {
            let d = Direction::from_angles(theta, phi);
            let t = HarmonicTable::new(3, &d);
            for l in 0..=3usize {
                for m in -(l as i32)..=(l as i32) {
                    assert!(
                        close(t.get(l, m), ylm_explicit(l, m, theta, phi), 1e-13),
                        "l={l} m={m} theta={theta}"
                    );
                }
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let d = Direction::from_angles(1.234, 0.77);
        let t = HarmonicTable::new(6, &d);
        for l in 0..=6usize {
            for m in 0..=(l as i32) {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!(close(t.get(l, -m), t.get(l, m).conj() * sign, 1e-15));
            }
        }
    }

    #[test]
    fn rejects_bad_m() {
        assert!(matches!(ylm(1, 2, &Direction::Z), Err(Error::InvalidLm { .. })));
        assert!(grad_ylm(0, -1, &Direction::Z).is_err());
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = grad_ylm(0, 0, &Direction::from_angles(0.9, 0.2)).unwrap();
        assert!(g.norm() < 1e-16);
    }

    #[test]
    fn y10_gradient_at_equator() {
        // theta-hat at (pi/2, 0) is -z, and dY/dtheta = -sqrt(3/4pi)
        let g = grad_ylm(1, 0, &Direction::X).unwrap();
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!(close(g.x, 0.0.into(), 1e-15));
        assert!(close(g.y, 0.0.into(), 1e-15));
        assert!(close(g.z, c.into(), 1e-15));
    }

    fn finite_difference_grad(l: usize, m: i32, d: &Direction) -> CVec3 {
        // project central differences along two tangent directions
        let k = d.vec();
        let a = if k.z.abs() < 0.9 { Vec3::z() } else { Vec3::x() };
        let t1 = k.cross(&a).normalize();
        let t2 = k.cross(&t1);
        let h = 1e-5;
        let deriv = |t: Vec3| {
            let p = Direction::normalize(k + t * h).unwrap();
            let q = Direction::normalize(k - t * h).unwrap();
            (ylm(l, m, &p).unwrap() - ylm(l, m, &q).unwrap()) / (2.0 * h)
        };
        let (d1, d2) = (deriv(t1), deriv(t2));
        crate::complexify(&t1) * d1 + crate::complexify(&t2) * d2
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for &(theta, phi) in &[(0.8, 1.3), (2.2, -0.4), (1e-3, 0.5), (1.5707, 3.0)] {
            let d = Direction::from_angles(theta, phi);
            for &(l, m) in &[(2, -1), (3, 2), (4, 0), (1, 1)] {
                let g = grad_ylm(l, m, &d).unwrap();
                let fd = finite_difference_grad(l, m, &d);
                assert!((g - fd).norm() < 1e-7, "l={l} m={m} at ({theta},{phi})");
                // tangential
                assert!((g.dot(&crate::complexify(&d.vec()))).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gradient_regular_at_poles() {
        for d in [Direction::Z, -Direction::Z] {
            for &(l, m) in &[(1, 1), (1, -1), (2, 1), (3, -1)] {
                let g = grad_ylm(l, m, &d).unwrap();
                let fd = finite_difference_grad(l, m, &d);
                assert!(g.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
                assert!((g - fd).norm() < 1e-7, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn rot_is_k_cross_grad() {
        let d = Direction::from_angles(1.9, 2.6);
        let t = HarmonicTable::new(4, &d);
        let k = crate::complexify(&d.vec());
        for l in 0..=4usize {
            for m in -(l as i32)..=(l as i32) {
                assert!((t.rot(l, m) - k.cross(&t.grad(l, m))).norm() < 1e-14);
            }
        }
    }
}
