//! Brute-force orientation averaging.
//!
//! Everything here works from evaluated dipole vectors. For each molecular
//! orientation `R` the molecular-frame amplitudes are rotated into the lab,
//! `D^L = R D^M`, and the spin-resolved rate
//!
//! ```text
//! W^M = 1/2 sum_mu |D^L_mu . E|^2 (1 + s . 2 mu R zeta)
//! ```
//!
//! is summed with Euler quadrature weights. The emission direction of a
//! molecular-frame momentum is `k^L = R k^M`. No closed-form average is used,
//! so agreement with [`crate::currents`] is an independent check.
//!
//! The lab-frame rate `W^L(khat, s)` is expanded in harmonics of the *lab*
//! emission direction.
//!
//! Sphere-node work runs in parallel; partial results are collected in node
//! order and summed sequentially, so values do not depend on thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::currents::PhotonField;
use crate::dipole::PartialWaveDipole;
use crate::sphharm::{lm_index, Direction, EulerAngles, EulerGrid, HarmonicTable, SphereGrid};
use crate::{rotate_complex, CVec3, Error, Mat3, Result, Vec3};

/// Polynomial degree in `R` of the current integrand `k^L W^M`.
pub const CURRENT_ROTATION_DEGREE: usize = 4;
/// Polynomial degree in `R` of `W^M` at fixed molecular-frame momentum.
pub const RATE_ROTATION_DEGREE: usize = 3;
/// Highest harmonic degree of `W^L` in the lab emission direction.
pub const LAB_RATE_DEGREE: usize = 3;

/// `(|D^L_up . E|^2, |D^L_down . E|^2)` for one orientation.
fn projected(r: &Mat3, d: &[CVec3; 2], e: &CVec3) -> (f64, f64) {
    let up = rotate_complex(r, &d[0]).dot(e).norm_sqr();
    let down = rotate_complex(r, &d[1]).dot(e).norm_sqr();
    (up, down)
}

/// Lab-frame image of the molecular spin axis `zeta = z`.
fn rotated_zeta(r: &Mat3) -> Vec3 {
    r.column(2).into_owned()
}

/// Molecular-frame rate `W^M(khat^M, s, rho)`.
pub fn rate_molecular(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction, rho: &EulerAngles, k_m: &Direction) -> f64 {
    let r = rho.matrix();
    let (up, down) = projected(&r, &d.evaluate_both(k_m), ph.polarization());
    let proj = s.vec().dot(&rotated_zeta(&r));
    0.5 * (up * (1.0 + proj) + down * (1.0 - proj))
}

/// A rate that is linear in the detection axis: `W(s) = unpolarized + s . spin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub unpolarized: f64,
    pub spin: Vec3,
}

impl RateSample {
    pub fn at(&self, s: &Direction) -> f64 {
        self.unpolarized + self.spin.dot(&s.vec())
    }
}

/// Orientation sum of `W^M` at fixed amplitudes `d`.
fn orientation_sum(d: &[CVec3; 2], e: &CVec3, euler: &EulerGrid) -> RateSample {
    let mut unpolarized = 0.0;
    let mut spin = Vec3::zeros();
    for (r, &v) in euler.rotations().iter().zip(euler.weights()) {
        let (up, down) = projected(r, d, e);
        unpolarized += 0.5 * (up + down) * v;
        spin += rotated_zeta(r) * (0.5 * (up - down) * v);
    }
    RateSample { unpolarized, spin }
}

/// Lab-frame rate `W^L(khat^L, s) = int drho W^M(R^T khat^L, s, rho)`.
pub fn rate_lab(d: &PartialWaveDipole, ph: &PhotonField, k_lab: &Direction, euler: &EulerGrid) -> Result<RateSample> {
    euler.require_degree(2 * d.lmax() + RATE_ROTATION_DEGREE)?;
    Ok(rate_lab_unchecked(d, ph.polarization(), k_lab, euler))
}

fn rate_lab_unchecked(d: &PartialWaveDipole, e: &CVec3, k_lab: &Direction, euler: &EulerGrid) -> RateSample {
    let mut unpolarized = 0.0;
    let mut spin = Vec3::zeros();
    let table_lmax = d.lmax();
    for (r, &v) in euler.rotations().iter().zip(euler.weights()) {
        let k_m = k_lab.rotated(&r.transpose());
        let table = HarmonicTable::new(table_lmax, &k_m);
        let amps = [
            d.evaluate_table(crate::dipole::Spin::Up, &table),
            d.evaluate_table(crate::dipole::Spin::Down, &table),
        ];
        let (up, down) = projected(r, &amps, e);
        unpolarized += 0.5 * (up + down) * v;
        spin += rotated_zeta(r) * (0.5 * (up - down) * v);
    }
    RateSample { unpolarized, spin }
}

fn ordered_sum(parts: Vec<Vec3>) -> Vec3 {
    parts.into_iter().fold(Vec3::zeros(), |a, b| a + b)
}

/// Net lab-frame current `int dTheta_k int drho (k R khat) W_part`.
///
/// `W_part` is the `s`-dependent half of `W^M` when `spin_conditioned`, the
/// `s`-independent half otherwise.
pub fn oracle_current(
    d: &PartialWaveDipole,
    ph: &PhotonField,
    s: &Direction,
    sphere: &SphereGrid,
    euler: &EulerGrid,
    spin_conditioned: bool,
) -> Result<Vec3> {
    sphere.require_degree(2 * d.lmax() + 1)?;
    euler.require_degree(CURRENT_ROTATION_DEGREE)?;
    let e = ph.polarization();
    let sv = s.vec();
    let k = d.k();
    let parts: Vec<Vec3> = sphere
        .nodes()
        .par_iter()
        .zip(sphere.weights().par_iter())
        .map(|(node, &w)| {
            let amps = d.evaluate_both(node);
            let mut acc = Vec3::zeros();
            for (r, &v) in euler.rotations().iter().zip(euler.weights()) {
                let (up, down) = projected(r, &amps, e);
                let part = if spin_conditioned {
                    0.5 * (up - down) * sv.dot(&rotated_zeta(r))
                } else {
                    0.5 * (up + down)
                };
                acc += (r * node.vec()) * (k * part * v);
            }
            acc * w
        })
        .collect();
    Ok(ordered_sum(parts))
}

/// The spin-conditioned oracle current split by symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCurrentParts {
    /// Helicity-odd part.
    pub cross: Vec3,
    /// Helicity-even part along the propagation axis.
    pub par: Vec3,
    /// Helicity-even part in the polarization plane.
    pub perp: Vec3,
}

impl SpinCurrentParts {
    pub fn total(&self) -> Vec3 {
        self.cross + self.par + self.perp
    }
}

/// Splits the spin-conditioned current using the helicity flip `E -> E*`.
///
/// Requires circular polarization in the xy plane.
pub fn oracle_spin_parts(
    d: &PartialWaveDipole,
    ph: &PhotonField,
    s: &Direction,
    sphere: &SphereGrid,
    euler: &EulerGrid,
) -> Result<SpinCurrentParts> {
    if !ph.is_circular_xy() {
        return Err(Error::UnsupportedPolarization);
    }
    let same = oracle_current(d, ph, s, sphere, euler, true)?;
    let flipped = oracle_current(d, &ph.flipped(), s, sphere, euler, true)?;
    let odd = (same - flipped) * 0.5;
    let even = (same + flipped) * 0.5;
    let par = Vec3::new(0.0, 0.0, even.z);
    Ok(SpinCurrentParts {
        cross: odd,
        par,
        perp: Vec3::new(even.x, even.y, 0.0),
    })
}

/// Full yield `int dTheta_s int dTheta_k int drho W^M` over the unit spin sphere.
pub fn oracle_yield(
    d: &PartialWaveDipole,
    ph: &PhotonField,
    sphere: &SphereGrid,
    euler: &EulerGrid,
    spin_grid: &SphereGrid,
) -> Result<f64> {
    sphere.require_degree(2 * d.lmax())?;
    euler.require_degree(RATE_ROTATION_DEGREE)?;
    spin_grid.require_degree(1)?;
    let e = ph.polarization();
    let parts: Vec<f64> = sphere
        .nodes()
        .par_iter()
        .zip(sphere.weights().par_iter())
        .map(|(node, &w)| {
            let rate = orientation_sum(&d.evaluate_both(node), e, euler);
            let over_s: f64 = spin_grid
                .nodes()
                .iter()
                .zip(spin_grid.weights())
                .map(|(s, &ws)| rate.at(s) * ws)
                .sum();
            over_s * w
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// Expansion coefficients `A^{l,m}_{ls,ms}` of `W^L` in `Y_{l,m}(khat^L) Y_{ls,ms}(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ATable {
    l_k: usize,
    l_s: usize,
    values: Vec<Complex64>,
}

impl ATable {
    pub fn l_k(&self) -> usize {
        self.l_k
    }

    pub fn l_s(&self) -> usize {
        self.l_s
    }

    fn index(&self, l: usize, m: i32, ls: usize, ms: i32) -> usize {
        assert!(l <= self.l_k && m.unsigned_abs() as usize <= l, "A-table index (l={l}, m={m}) out of range");
        assert!(ls <= self.l_s && ms.unsigned_abs() as usize <= ls, "A-table index (ls={ls}, ms={ms}) out of range");
        lm_index(l, m) * (self.l_s + 1).pow(2) + lm_index(ls, ms)
    }

    /// Panics outside `l <= l_k`, `ls <= l_s`.
    pub fn get(&self, l: usize, m: i32, ls: usize, ms: i32) -> Complex64 {
        self.values[self.index(l, m, ls, ms)]
    }

    /// `(l, m, ls, ms, value)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, usize, i32, Complex64)> + '_ {
        let l_s = self.l_s;
        (0..=self.l_k)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
            .flat_map(move |(l, m)| {
                (0..=l_s).flat_map(move |ls| (-(ls as i32)..=ls as i32).map(move |ms| (l, m, ls, ms)))
            })
            .map(|(l, m, ls, ms)| (l, m, ls, ms, self.get(l, m, ls, ms)))
    }
}

/// Grids that make [`a_coefficients`] exact.
#[derive(Debug, Clone)]
pub struct AGrids {
    pub k: SphereGrid,
    pub s: SphereGrid,
    pub euler: EulerGrid,
}

impl AGrids {
    pub fn for_lmax(lmax: usize, l_k: usize, l_s: usize) -> Self {
        AGrids {
            k: SphereGrid::new((LAB_RATE_DEGREE + l_k).div_ceil(2)),
            s: SphereGrid::new((1 + l_s).div_ceil(2)),
            euler: EulerGrid::new(lmax + 1),
        }
    }
}

pub fn a_coefficients(d: &PartialWaveDipole, ph: &PhotonField, grids: &AGrids, l_k: usize, l_s: usize) -> Result<ATable> {
    grids.euler.require_degree(2 * d.lmax() + RATE_ROTATION_DEGREE)?;
    grids.k.require_degree(LAB_RATE_DEGREE + l_k)?;
    grids.s.require_degree(1 + l_s)?;
    let e = ph.polarization();
    let s_tables: Vec<HarmonicTable> = grids.s.nodes().iter().map(|s| HarmonicTable::new(l_s, s)).collect();
    let ns = (l_s + 1).pow(2);
    let size = (l_k + 1).pow(2) * ns;

    let parts: Vec<Vec<Complex64>> = grids
        .k
        .nodes()
        .par_iter()
        .zip(grids.k.weights().par_iter())
        .map(|(node, &wk)| {
            let rate = rate_lab_unchecked(d, e, node, &grids.euler);
            let yk = HarmonicTable::new(l_k, node);
            // int dTheta_s W(s) Y*_{ls,ms}(s)
            let mut spin_moments = vec![Complex64::new(0.0, 0.0); ns];
            for ((s, &ws), ys) in grids.s.nodes().iter().zip(grids.s.weights()).zip(&s_tables) {
                let w = rate.at(s) * ws;
                for (acc, y) in spin_moments.iter_mut().zip(ys.values()) {
                    *acc += y.conj() * w;
                }
            }
            let mut out = Vec::with_capacity(size);
            for y in yk.values() {
                let c = y.conj() * wk;
                out.extend(spin_moments.iter().map(|sm| c * sm));
            }
            out
        })
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); size];
    for part in parts {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    Ok(ATable { l_k, l_s, values })
}

/// Grids that make [`oracle_current`] exact for a given band limit.
#[derive(Debug, Clone)]
pub struct OracleGrids {
    pub sphere: SphereGrid,
    pub euler: EulerGrid,
}

impl OracleGrids {
    pub fn for_lmax(lmax: usize) -> Self {
        OracleGrids {
            sphere: SphereGrid::new(lmax + 1),
            euler: EulerGrid::new(CURRENT_ROTATION_DEGREE.div_ceil(2)),
        }
    }

    /// Both grid orders doubled.
    pub fn refined(&self) -> Self {
        OracleGrids {
            sphere: SphereGrid::new(2 * self.sphere.band().max(1)),
            euler: EulerGrid::new(2 * self.euler.band().max(1)),
        }
    }
}

/// Floor of the comparison scale, relative to the largest current in a set.
pub const DEVIATION_FLOOR: f64 = 1e-3;
/// Floor of the comparison scale, relative to `k N`, the largest possible current.
pub const NOISE_FLOOR: f64 = 1e-6;

/// `max_i |a_i - b_i| / max(|a|, |b|, floor)`.
pub fn relative_deviation(a: &Vec3, b: &Vec3, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm()).max(floor);
    if scale == 0.0 {
        return 0.0;
    }
    (a - b).amax() / scale
}

/// Closed-form currents next to their oracle counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub analytic: crate::currents::CurrentSet,
    pub net: Vec3,
    pub parts: SpinCurrentParts,
    /// Oracle yield over the full spin sphere, `4 pi N`.
    pub full_yield: f64,
    /// Deviations of (pecd, cross, par, perp, yield).
    pub deviations: [f64; 5],
}

impl OracleComparison {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs the oracle on exact grids and compares every closed-form output.
///
/// Vector deviations use [`relative_deviation`] with a floor of
/// [`DEVIATION_FLOOR`] times the largest current magnitude, so currents that
/// vanish by symmetry are judged against the scale of the others, and of
/// [`NOISE_FLOOR`] times `k N`, so sets that vanish entirely (achiral
/// dipoles) are judged against the yield.
pub fn compare_with_oracle(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction) -> Result<OracleComparison> {
    let shell = SphereGrid::new(crate::currents::shell_grid_band(d.lmax()));
    let analytic = crate::currents::current_set(d, ph, s, &shell)?;
    let g = OracleGrids::for_lmax(d.lmax());
    let net = oracle_current(d, ph, s, &g.sphere, &g.euler, false)?;
    let parts = oracle_spin_parts(d, ph, s, &g.sphere, &g.euler)?;
    let full_yield = oracle_yield(d, ph, &g.sphere, &g.euler, &SphereGrid::new(1))?;

    let pairs = [
        (analytic.pecd.vector, net),
        (analytic.cross.vector, parts.cross),
        (analytic.par.vector, parts.par),
        (analytic.perp.vector, parts.perp),
    ];
    let largest = pairs.iter().map(|(a, b)| a.norm().max(b.norm())).fold(0.0, f64::max);
    let floor = (DEVIATION_FLOOR * largest).max(NOISE_FLOOR * d.k() * analytic.total_yield);
    let mut deviations = [0.0; 5];
    for (dev, (a, b)) in deviations.iter_mut().zip(&pairs) {
        *dev = relative_deviation(a, b, floor);
    }
    let want = 4.0 * std::f64::consts::PI * analytic.total_yield;
    let scale = want.abs().max(full_yield.abs());
    deviations[4] = if scale == 0.0 { 0.0 } else { (want - full_yield).abs() / scale };
    Ok(OracleComparison {
        analytic,
        net,
        parts,
        full_yield,
        deviations,
    })
}
