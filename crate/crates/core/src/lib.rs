//! Spin-resolved, enantio-sensitive photoelectron currents.
//!
//! The crate takes partial-wave photoionization dipoles (one complex
//! Cartesian 3-vector per spin channel, expanded in complex spherical
//! harmonics of the photoelectron direction) and computes:
//!
//! * geometric propensity fields `B = i D* x D` per spin channel, their
//!   spin-symmetric/antisymmetric combinations and multipole moments
//!   ([`fields`]);
//! * closed-form orientation-averaged currents: the PECD current and the
//!   three spin-resolved currents `j_cross`, `j_par`, `j_perp`, plus the
//!   total yield ([`currents`]);
//! * the same observables by brute-force quadrature over molecular
//!   orientations, used as an independent reference ([`oracle`]).
//!
//! Conventions are collected in `docs/conventions.md` at the repository root.

pub mod currents;
pub mod dipole;
mod error;
pub mod fields;
pub mod oracle;
pub mod sphharm;

pub use error::{Error, Result};

use num_complex::Complex64;

/// Real Cartesian 3-vector.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Complex Cartesian 3-vector.
pub type CVec3 = nalgebra::Vector3<Complex64>;
/// Real 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Applies a real matrix to a complex vector.
pub(crate) fn rotate_complex(r: &Mat3, v: &CVec3) -> CVec3 {
    let re = r * v.map(|c| c.re);
    let im = r * v.map(|c| c.im);
    CVec3::new(
        Complex64::new(re.x, im.x),
        Complex64::new(re.y, im.y),
        Complex64::new(re.z, im.z),
    )
}

/// Promotes a real vector to a complex one.
pub(crate) fn complexify(v: &Vec3) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}
