//! Dipoles of bound-state superpositions from single-center channel models.
//!
//! A bound component `a |l_b, m_b, mu>` ionizes into continuum partial waves
//! `l' = l_b +- 1`, each with a complex amplitude `tau_{l'}` that absorbs the
//! radial integral and scattering phase. The angular part is
//!
//! ```text
//! c[q][mu][l'][m'] = a tau_{l'} int conj(Y_{l',m'}) rhat_q Y_{l_b,m_b} dOmega
//! ```
//!
//! with `rhat_q` expanded in `Y_{1,qs}`, which reduces to Gaunt coefficients.
//! Two components are mixed as `cos(phi) |first> + s sin(phi) |second>` with
//! `s = +-1` (real mixing) or `s = +-i` (imaginary mixing).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::{Axis, PartialWaveDipole, Spin};
use crate::sphharm::GauntCache;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumChannel {
    pub l: usize,
    pub tau: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundComponent {
    pub l: usize,
    pub m: i32,
    pub spin: Spin,
    pub amplitude: Complex64,
    pub channels: Vec<ContinuumChannel>,
}

/// Real (`p`) or imaginary (`c`) relative phase of the second component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Superposition {
    P,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixSign {
    Plus,
    Minus,
}

impl MixSign {
    pub fn value(self) -> f64 {
        match self {
            MixSign::Plus => 1.0,
            MixSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub bound: Vec<BoundComponent>,
    pub mixing_angle: f64,
    pub superposition: Superposition,
    pub sign: MixSign,
}

impl ChannelSpec {
    /// Every violation, in component order.
    pub fn violations(&self) -> Vec<Error> {
        let mut out = Vec::new();
        if self.bound.is_empty() {
            out.push(Error::ChannelSpec("at least one bound component is required".into()));
        }
        if self.bound.len() > 2 {
            out.push(Error::ChannelSpec(format!(
                "at most two bound components can be mixed, got {}",
                self.bound.len()
            )));
        }
        if !self.mixing_angle.is_finite() {
            out.push(Error::ChannelSpec("mixing angle must be finite".into()));
        }
        for b in &self.bound {
            if b.m.unsigned_abs() as usize > b.l {
                out.push(Error::InvalidLm { l: b.l, m: b.m });
            }
            for ch in &b.channels {
                if ch.l.abs_diff(b.l) != 1 {
                    out.push(Error::SelectionRule {
                        bound: b.l,
                        continuum: ch.l,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Mixing weight of each bound component.
    pub fn weights(&self) -> Vec<Complex64> {
        let (s, c) = self.mixing_angle.sin_cos();
        let second = match self.superposition {
            Superposition::P => Complex64::new(self.sign.value() * s, 0.0),
            Superposition::C => Complex64::new(0.0, self.sign.value() * s),
        };
        self.bound
            .iter()
            .enumerate()
            .map(|(i, _)| if i == 0 { Complex64::new(c, 0.0) } else { second })
            .collect()
    }

    fn lmax(&self) -> usize {
        self.bound
            .iter()
            .flat_map(|b| b.channels.iter().map(|c| c.l))
            .max()
            .unwrap_or(0)
    }
}

/// `rhat_q = sqrt(4 pi / 3) sum_qs u[q][qs] Y_{1,qs}`; entries for qs = -1, 0, +1.
fn cartesian_from_spherical(q: Axis) -> [Complex64; 3] {
    let h = FRAC_1_SQRT_2;
    match q {
        Axis::X => [Complex64::new(h, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-h, 0.0)],
        Axis::Y => [Complex64::new(0.0, h), Complex64::new(0.0, 0.0), Complex64::new(0.0, h)],
        Axis::Z => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    }
}

fn component_dipole(b: &BoundComponent, k: f64, lmax: usize, gaunts: &mut GauntCache) -> Result<PartialWaveDipole> {
    let mut d = PartialWaveDipole::zeros(k, lmax)?;
    let norm = (4.0 * PI / 3.0).sqrt();
    for ch in &b.channels {
        let lc = ch.l as i32;
        for m_c in -lc..=lc {
            let qs = m_c - b.m;
            if qs.abs() > 1 {
                continue;
            }
            let g = gaunts.get(ch.l, m_c, 1, qs, b.l, b.m)?;
            if g == 0.0 {
                continue;
            }
            for q in Axis::ALL {
                let u = cartesian_from_spherical(q)[(qs + 1) as usize];
                if u == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let add = b.amplitude * ch.tau * u * (norm * g);
                let cur = d.coeff(q, b.spin, ch.l, m_c)?;
                d.set_coeff(q, b.spin, ch.l, m_c, cur + add)?;
            }
        }
    }
    Ok(d)
}

/// Builds the partial-wave dipole of a channel-model superposition at `k`.
///
/// Components whose mixing weight is exactly zero are skipped, so the
/// `phi = 0` dipole does not depend on the superposition type at all.
pub fn channel_dipole(spec: &ChannelSpec, k: f64) -> Result<PartialWaveDipole> {
    spec.validate()?;
    let lmax = spec.lmax();
    let mut out = PartialWaveDipole::zeros(k, lmax)?;
    let mut gaunts = GauntCache::new();
    for (b, w) in spec.bound.iter().zip(spec.weights()) {
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = component_dipole(b, k, lmax, &mut gaunts)?;
        out.add_scaled(&d, w);
    }
    let kind = match spec.superposition {
        Superposition::P => "p",
        Superposition::C => "c",
    };
    let sign = match spec.sign {
        MixSign::Plus => "+",
        MixSign::Minus => "-",
    };
    Ok(out.with_label(format!("channel {kind}{sign} phi={}", spec.mixing_angle)))
}
