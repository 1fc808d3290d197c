//! Angular-momentum and quadrature foundation.
//!
//! Complex spherical harmonics carry the Condon-Shortley phase and are
//! orthonormal on the unit sphere. Euler angles use the active z-y-z
//! convention, `R(alpha, beta, gamma) = Rz(alpha) Ry(beta) Rz(gamma)`.

mod gaunt;
mod grid;
mod harmonics;
mod rotation;

pub use gaunt::{gaunt, GauntCache};
pub use grid::{gauss_legendre, integrate_euler, integrate_sphere, EulerGrid, SphereGrid};
pub use harmonics::{grad_ylm, lm_index, rot_ylm, ylm, HarmonicTable};
pub use rotation::{rotation_matrix, rz, ry, EulerAngles};

use crate::{Error, Result, Vec3};

const UNIT_TOLERANCE: f64 = 1e-12;

/// A unit vector on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec3);

impl Direction {
    pub const X: Direction = Direction(Vec3::new(1.0, 0.0, 0.0));
    pub const Y: Direction = Direction(Vec3::new(0.0, 1.0, 0.0));
    pub const Z: Direction = Direction(Vec3::new(0.0, 0.0, 1.0));

    /// Wraps `v`, which must already have unit norm to 1e-12.
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit { norm });
        }
        Ok(Direction(v))
    }

    /// Normalizes `v`; `None` for the zero vector or non-finite input.
    pub fn normalize(v: Vec3) -> Option<Self> {
        let norm = v.norm();
        (norm.is_finite() && norm > 0.0).then(|| Direction(v / norm))
    }

    /// Polar angle `theta` from +z and azimuth `phi` from +x, in radians.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction(Vec3::new(st * cp, st * sp, ct))
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn theta(&self) -> f64 {
        self.0.z.clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    /// Applies a rotation matrix. The result is renormalized to absorb rounding.
    pub fn rotated(&self, r: &crate::Mat3) -> Self {
        let v = r * self.0;
        Direction(v / v.norm())
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

impl From<Direction> for Vec3 {
    fn from(d: Direction) -> Vec3 {
        d.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit() {
        assert!(matches!(
            Direction::new(Vec3::new(0.0, 0.0, 2.0)),
            Err(Error::NotUnit { .. })
        ));
        assert!(Direction::normalize(Vec3::zeros()).is_none());
    }

    #[test]
    fn angles_round_trip() {
        let d = Direction::from_angles(1.1, -2.3);
        assert!((d.theta() - 1.1).abs() < 1e-14);
        assert!((d.phi() + 2.3).abs() < 1e-14);
        assert!((d.vec().norm() - 1.0).abs() < 1e-15);
    }
}
