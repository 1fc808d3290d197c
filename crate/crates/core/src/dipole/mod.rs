//! Spin-resolved partial-wave photoionization dipoles.
//!
//! A dipole stores, for each Cartesian component `q` and spin channel `mu`,
//! the complex coefficients `c[q][mu][l][m]` of
//!
//! ```text
//! D_q(k) = sum_{l <= lmax, |m| <= l} c[q][mu][l][m] Y_{l,m}(k)
//! ```
//!
//! at a fixed photoelectron momentum magnitude `k` (atomic units).

mod channel;
mod io;

pub use channel::{channel_dipole, BoundComponent, ChannelSpec, ContinuumChannel, MixSign, Superposition};
pub use io::{load_dipole, load_dipoles, read_dipoles, save_dipole, save_dipoles, write_dipoles};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sphharm::{lm_index, Direction, HarmonicTable};
use crate::{CVec3, Error, Result};

/// Spin projection `mu = +1/2` (`Up`) or `-1/2` (`Down`) on the molecular z axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn mu(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    /// `sgn(2 mu)`.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn from_mu(mu: f64) -> Option<Spin> {
        if mu == 0.5 {
            Some(Spin::Up)
        } else if mu == -0.5 {
            Some(Spin::Down)
        } else {
            None
        }
    }

    fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Cartesian component of the dipole vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Enantiomer label. `S` is the reference handedness of a stored dipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnantiomerTag {
    S,
    R,
}

impl EnantiomerTag {
    pub fn mirrored(self) -> Self {
        match self {
            EnantiomerTag::S => EnantiomerTag::R,
            EnantiomerTag::R => EnantiomerTag::S,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialWaveDipole {
    k: f64,
    lmax: usize,
    coeffs: Vec<Complex64>,
    label: String,
}

impl PartialWaveDipole {
    /// All-zero dipole. `k` must be positive and finite.
    pub fn zeros(k: f64, lmax: usize) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidDipole(format!("wavenumber must be positive, got {k}")));
        }
        let n = 3 * 2 * (lmax + 1) * (lmax + 1);
        Ok(PartialWaveDipole {
            k,
            lmax,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            label: String::new(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same coefficients at a different wavenumber.
    pub fn with_k(mut self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidDipole(format!("wavenumber must be positive, got {k}")));
        }
        self.k = k;
        Ok(self)
    }

    fn nlm(&self) -> usize {
        (self.lmax + 1) * (self.lmax + 1)
    }

    fn offset(&self, q: Axis, spin: Spin) -> usize {
        (q.index() * 2 + spin.index()) * self.nlm()
    }

    fn check_lm(&self, l: usize, m: i32) -> Result<()> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidLm { l, m });
        }
        if l > self.lmax {
            return Err(Error::InvalidDipole(format!("l = {l} exceeds lmax = {}", self.lmax)));
        }
        Ok(())
    }

    pub fn coeff(&self, q: Axis, spin: Spin, l: usize, m: i32) -> Result<Complex64> {
        self.check_lm(l, m)?;
        Ok(self.coeffs[self.offset(q, spin) + lm_index(l, m)])
    }

    pub fn set_coeff(&mut self, q: Axis, spin: Spin, l: usize, m: i32, value: Complex64) -> Result<()> {
        self.check_lm(l, m)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::InvalidDipole(format!("non-finite coefficient {value}")));
        }
        let i = self.offset(q, spin) + lm_index(l, m);
        self.coeffs[i] = value;
        Ok(())
    }

    /// Coefficient block `c[q][mu][..]` in `lm_index` order.
    pub fn block(&self, q: Axis, spin: Spin) -> &[Complex64] {
        let o = self.offset(q, spin);
        &self.coeffs[o..o + self.nlm()]
    }

    /// Every stored coefficient as `(q, mu, l, m, c)`, in file order.
    pub fn terms(&self) -> impl Iterator<Item = (Axis, Spin, usize, i32, Complex64)> + '_ {
        Axis::ALL.into_iter().flat_map(move |q| {
            Spin::BOTH.into_iter().flat_map(move |s| {
                (0..=self.lmax).flat_map(move |l| {
                    let li = l as i32;
                    (-li..=li).map(move |m| (q, s, l, m, self.coeffs[self.offset(q, s) + lm_index(l, m)]))
                })
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `D_mu(k)` from a precomputed harmonic table with `lmax >= self.lmax()`.
    pub fn evaluate_table(&self, spin: Spin, table: &HarmonicTable) -> CVec3 {
        debug_assert!(table.lmax() >= self.lmax);
        let nlm = self.nlm();
        let ys = &table.values()[..nlm];
        let mut out = CVec3::zeros();
        for q in Axis::ALL {
            let block = self.block(q, spin);
            out[q.index()] = block.iter().zip(ys).map(|(c, y)| c * y).sum();
        }
        out
    }

    /// `D_mu(k)` at a direction.
    pub fn evaluate(&self, spin: Spin, dir: &Direction) -> CVec3 {
        self.evaluate_table(spin, &HarmonicTable::new(self.lmax, dir))
    }

    /// Both spin channels at one direction, `[D_up, D_down]`.
    pub fn evaluate_both(&self, dir: &Direction) -> [CVec3; 2] {
        let t = HarmonicTable::new(self.lmax, dir);
        [self.evaluate_table(Spin::Up, &t), self.evaluate_table(Spin::Down, &t)]
    }

    /// Opposite enantiomer: `D'(k) = -D(-k)`, i.e. `c' = -(-1)^l c`.
    pub fn enantiomer(&self) -> Self {
        let mut out = self.clone();
        for q in Axis::ALL {
            for s in Spin::BOTH {
                let o = out.offset(q, s);
                for l in 0..=self.lmax {
                    let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
                    let li = l as i32;
                    for m in -li..=li {
                        out.coeffs[o + lm_index(l, m)] *= sign;
                    }
                }
            }
        }
        out
    }

    /// Reproducible test dipole.
    ///
    /// Coefficients are drawn from a ChaCha8 stream seeded with `seed`, in
    /// file order (`q`, then `mu`, then `l`, then `m`), real part first; each
    /// part is uniform on `[-1, 1)`. `lmax` must be at least 1.
    pub fn random(seed: u64, lmax: usize, k: f64) -> Result<Self> {
        if lmax < 1 {
            return Err(Error::InvalidDipole("random dipole needs lmax >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Self::zeros(k, lmax)?;
        for c in d.coeffs.iter_mut() {
            let re = rng.random_range(-1.0..1.0);
            let im = rng.random_range(-1.0..1.0);
            *c = Complex64::new(re, im);
        }
        Ok(d.with_label(format!("random seed={seed} lmax={lmax}")))
    }

    /// Adds `weight * other` in place; `other.lmax()` may be smaller.
    pub(crate) fn add_scaled(&mut self, other: &Self, weight: Complex64) {
        debug_assert!(other.lmax <= self.lmax);
        for (q, s, l, m, c) in other.terms() {
            let i = self.offset(q, s) + lm_index(l, m);
            self.coeffs[i] += weight * c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_evaluate(d: &PartialWaveDipole, spin: Spin, dir: &Direction) -> CVec3 {
        let mut out = CVec3::zeros();
        for (q, s, l, m, c) in d.terms() {
            if s == spin {
                out[q.index()] += c * crate::sphharm::ylm(l, m, dir).unwrap();
            }
        }
        out
    }

    #[test]
    fn zero_dipole_evaluates_to_zero() {
        let d = PartialWaveDipole::zeros(1.0, 3).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.evaluate(Spin::Up, &Direction::from_angles(0.3, 0.2)), CVec3::zeros());
    }

    #[test]
    fn constant_z_dipole() {
        let mut d = PartialWaveDipole::zeros(1.0, 1).unwrap();
        d.set_coeff(Axis::Z, Spin::Up, 0, 0, 1.0.into()).unwrap();
        for dir in [Direction::X, Direction::from_angles(2.0, -1.0)] {
            let v = d.evaluate(Spin::Up, &dir);
            assert!((v.z - 1.0 / (4.0 * PI).sqrt()).norm() < 1e-15);
            assert_eq!(v.x, Complex64::new(0.0, 0.0));
            assert_eq!(d.evaluate(Spin::Down, &dir), CVec3::zeros());
        }
    }

    #[test]
    fn evaluation_matches_term_by_term_sum() {
        let d = PartialWaveDipole::random(11, 3, 0.8).unwrap();
        let dir = Direction::from_angles(1.0, 0.5);
        for spin in Spin::BOTH {
            let fast = d.evaluate(spin, &dir);
            let slow = naive_evaluate(&d, spin, &dir);
            assert!((fast - slow).norm() < 1e-13);
        }
    }

    #[test]
    fn enantiomer_sign_rule() {
        let mut d = PartialWaveDipole::zeros(1.0, 1).unwrap();
        d.set_coeff(Axis::X, Spin::Up, 0, 0, 1.0.into()).unwrap();
        d.set_coeff(Axis::Y, Spin::Down, 1, -1, 1.0.into()).unwrap();
        let e = d.enantiomer();
        assert_eq!(e.coeff(Axis::X, Spin::Up, 0, 0).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(e.coeff(Axis::Y, Spin::Down, 1, -1).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn enantiomer_is_parity_with_sign() {
        let d = PartialWaveDipole::random(5, 4, 1.2).unwrap();
        let e = d.enantiomer();
        for i in 0..20 {
            let dir = Direction::from_angles(0.15 * i as f64 + 0.05, 0.9 * i as f64 - 3.0);
            for spin in Spin::BOTH {
                let lhs = e.evaluate(spin, &dir);
                let rhs = -d.evaluate(spin, &-dir);
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
        assert_eq!(e.enantiomer(), d);
    }

    #[test]
    fn random_is_reproducible() {
        let a = PartialWaveDipole::random(1, 2, 1.0).unwrap();
        let b = PartialWaveDipole::random(1, 2, 1.0).unwrap();
        let c = PartialWaveDipole::random(2, 2, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.block(Axis::X, Spin::Up), c.block(Axis::X, Spin::Up));
        assert_ne!(a.block(Axis::Z, Spin::Up), a.block(Axis::Z, Spin::Down));
        assert!(PartialWaveDipole::random(1, 0, 1.0).is_err());
    }

    #[test]
    fn coefficient_bounds_checked() {
        let mut d = PartialWaveDipole::zeros(1.0, 2).unwrap();
        assert!(matches!(d.coeff(Axis::X, Spin::Up, 1, 2), Err(Error::InvalidLm { .. })));
        assert!(d.set_coeff(Axis::X, Spin::Up, 3, 0, 1.0.into()).is_err());
        assert!(d.set_coeff(Axis::X, Spin::Up, 1, 0, f64::NAN.into()).is_err());
        assert!(PartialWaveDipole::zeros(0.0, 1).is_err());
        assert!(PartialWaveDipole::zeros(-1.0, 1).is_err());
    }
}
