//! Geometric propensity fields and their moments on the energy shell.
//!
//! For a complex dipole vector `D` the propensity field is the real axial
//! vector `B = i D* x D`. Per spin channel this gives `B_up`, `B_down`, and
//! the spin-symmetric/antisymmetric combinations `B_+- = (B_up +- B_down)/2`.
//!
//! All shell integrals run over the unit sphere of directions; no powers of
//! `k` are folded in here.

use num_complex::Complex64;

use crate::dipole::{PartialWaveDipole, Spin};
use crate::sphharm::{lm_index, HarmonicTable, SphereGrid};
use crate::{complexify, CVec3, Result, Vec3};

/// `i D* x D`, returned as a real vector.
///
/// The imaginary part vanishes identically: each component has the form
/// `z - conj(z)` and the real parts cancel term by term in floating point.
pub fn propensity(d: &CVec3) -> Vec3 {
    let c = d.map(|z| z.conj()).cross(d);
    debug_assert!(c.iter().all(|z| z.re.abs() <= 1e-12 * d.norm_squared().max(f64::MIN_POSITIVE)));
    // i (a + ib) = -b + ia
    Vec3::new(-c.x.im, -c.y.im, -c.z.im)
}

/// Which propensity field to take moments of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSelector {
    Plus,
    Minus,
    Channel(Spin),
}

/// Propensity fields sampled at the nodes of a sphere grid.
#[derive(Debug, Clone)]
pub struct PropensityFieldSamples {
    grid: SphereGrid,
    k: f64,
    lmax: usize,
    up: Vec<Vec3>,
    down: Vec<Vec3>,
    plus: Vec<Vec3>,
    minus: Vec<Vec3>,
}

impl PropensityFieldSamples {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Band limit of the dipole the fields came from.
    pub fn dipole_lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, which: FieldSelector) -> &[Vec3] {
        match which {
            FieldSelector::Plus => &self.plus,
            FieldSelector::Minus => &self.minus,
            FieldSelector::Channel(Spin::Up) => &self.up,
            FieldSelector::Channel(Spin::Down) => &self.down,
        }
    }

    /// `int dOmega k . B`: net radial flux over the unit sphere.
    pub fn radial_flux(&self, which: FieldSelector) -> f64 {
        self.integrate(which, |n, b| n.dot(b))
    }

    /// `int dOmega axis . (B x k)` over the unit sphere.
    pub fn vortex_flux(&self, which: FieldSelector, axis: &Vec3) -> f64 {
        self.integrate(which, |n, b| axis.dot(&b.cross(n)))
    }

    fn integrate(&self, which: FieldSelector, f: impl Fn(&Vec3, &Vec3) -> f64) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(self.get(which))
            .fold(0.0, |acc, ((n, w), b)| acc + f(&n.vec(), b) * w)
    }
}

/// Samples `B_up`, `B_down`, `B_+` and `B_-` of `d` on `grid`.
pub fn field_samples(d: &PartialWaveDipole, grid: &SphereGrid) -> PropensityFieldSamples {
    let n = grid.len();
    let mut up = Vec::with_capacity(n);
    let mut down = Vec::with_capacity(n);
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for node in grid.nodes() {
        let [du, dd] = d.evaluate_both(node);
        let bu = propensity(&du);
        let bd = propensity(&dd);
        up.push(bu);
        down.push(bd);
        plus.push((bu + bd) * 0.5);
        minus.push((bu - bd) * 0.5);
    }
    PropensityFieldSamples {
        grid: grid.clone(),
        k: d.k(),
        lmax: d.lmax(),
        up,
        down,
        plus,
        minus,
    }
}

/// Moments of one propensity field:
///
/// * `omega = int B`
/// * `bpar = int k . B`
/// * `bpar_lm = int (k . B) Y_{l,m}`
/// * `bperp1_lm = int B . grad Y_{l,m}`
/// * `bperp2_lm = int B . (k x grad) Y_{l,m}`
///
/// with unconjugated harmonics and the unit-sphere surface gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleSet {
    pub omega: Vec3,
    pub bpar: f64,
    l_report: usize,
    bpar_lm: Vec<Complex64>,
    bperp1_lm: Vec<Complex64>,
    bperp2_lm: Vec<Complex64>,
}

impl MultipoleSet {
    pub fn l_report(&self) -> usize {
        self.l_report
    }

    fn lookup(table: &[Complex64], l_report: usize, l: usize, m: i32) -> Complex64 {
        if l > l_report || m.unsigned_abs() as usize > l {
            return Complex64::new(0.0, 0.0);
        }
        table[lm_index(l, m)]
    }

    pub fn bpar_lm(&self, l: usize, m: i32) -> Complex64 {
        Self::lookup(&self.bpar_lm, self.l_report, l, m)
    }

    pub fn bperp1_lm(&self, l: usize, m: i32) -> Complex64 {
        Self::lookup(&self.bperp1_lm, self.l_report, l, m)
    }

    pub fn bperp2_lm(&self, l: usize, m: i32) -> Complex64 {
        Self::lookup(&self.bperp2_lm, self.l_report, l, m)
    }

    /// `(l, m)` pairs in table order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, i32)> {
        (0..=self.l_report).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
    }
}

/// Default reporting band: moments above `2 lmax + 1` vanish identically.
pub fn default_l_report(lmax: usize) -> usize {
    2 * lmax + 1
}

pub fn moments(f: &PropensityFieldSamples, which: FieldSelector, l_report: usize) -> Result<MultipoleSet> {
    f.grid.require_degree(2 * f.lmax + l_report + 1)?;
    let n = (l_report + 1) * (l_report + 1);
    let mut omega = Vec3::zeros();
    let mut bpar = 0.0;
    let mut bpar_lm = vec![Complex64::new(0.0, 0.0); n];
    let mut bperp1_lm = bpar_lm.clone();
    let mut bperp2_lm = bpar_lm.clone();

    for ((node, &w), b) in f.grid.nodes().iter().zip(f.grid.weights()).zip(f.get(which)) {
        let kh = node.vec();
        let radial = kh.dot(b);
        omega += b * w;
        bpar += radial * w;
        let table = HarmonicTable::new(l_report, node);
        let bc = complexify(b);
        for l in 0..=l_report {
            let li = l as i32;
            for m in -li..=li {
                let i = lm_index(l, m);
                bpar_lm[i] += table.get(l, m) * (radial * w);
                bperp1_lm[i] += bc.dot(&table.grad(l, m)) * w;
                bperp2_lm[i] += bc.dot(&table.rot(l, m)) * w;
            }
        }
    }
    Ok(MultipoleSet {
        omega,
        bpar,
        l_report,
        bpar_lm,
        bperp1_lm,
        bperp2_lm,
    })
}
