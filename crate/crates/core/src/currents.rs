//! Closed-form orientation-averaged photoelectron currents.
//!
//! For an isotropic ensemble ionized by one photon, the lab-frame currents
//! factor into a molecular-frame shell integral times a lab-frame vector:
//!
//! ```text
//! j_pecd  = [ 1/6  int (k . B_+)                        ] Xi
//! j_cross = [ 1/12 int sigma . (B_- x k)                ] (s x Xi)
//! j_par   = [ 1/15 int I2(k)                            ] |E|^2 (s . z) z
//! j_perp  = [ 1/20 int I-3(k)                           ] |E|^2 (s - (s . z) z)
//! N       =   1/6 (sum_mu int |D_mu|^2) |E|^2
//! ```
//!
//! Integrals run over the unit sphere of directions with `k = |k| khat`, so
//! the molecular factors carry one power of `|k|`; `N` carries none.
//! `sigma` is the molecular spin quantization axis of `mu = +1/2`, and
//!
//! ```text
//! I_L(k) = sum_mu sgn(2 mu) [ |D_mu|^2 (k . sigma) - Re((D_mu . k)(D_mu* . sigma)) / L ]
//! ```
//!
//! is the spin-weight difference `W_L (k . sigma)` with the `1/(k . sigma)`
//! of the ratio form cancelled, so it is finite everywhere.
//!
//! The `j_par`/`j_perp` split assumes circular polarization in the lab xy
//! plane; `j_pecd` and `j_cross` hold for any polarization.

use num_complex::Complex64;

use crate::dipole::{PartialWaveDipole, Spin};
use crate::fields::propensity;
use crate::sphharm::{Direction, SphereGrid};
use crate::{complexify, CVec3, Error, Result, Vec3};

const CIRCULAR_TOLERANCE: f64 = 1e-12;
const RATIO_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    pub fn from_sign(xi: i32) -> Option<Self> {
        match xi {
            1 => Some(Helicity::Plus),
            -1 => Some(Helicity::Minus),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Plus => Helicity::Minus,
            Helicity::Minus => Helicity::Plus,
        }
    }
}

/// Lab-frame complex field amplitude `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonField {
    e: CVec3,
    // |E|^2, kept exactly as given for circular fields
    intensity: f64,
    omega: Option<f64>,
}

impl PhotonField {
    /// `E = E0 (x + i xi y) / sqrt(2)` with `|E0|^2 = intensity`.
    pub fn circular(helicity: Helicity, intensity: f64) -> Result<Self> {
        if !(intensity.is_finite() && intensity >= 0.0) {
            return Err(Error::InvalidDipole(format!("field intensity must be non-negative, got {intensity}")));
        }
        let a = (intensity / 2.0).sqrt();
        Ok(PhotonField {
            e: CVec3::new(Complex64::new(a, 0.0), Complex64::new(0.0, helicity.sign() * a), Complex64::new(0.0, 0.0)),
            intensity,
            omega: None,
        })
    }

    /// Arbitrary polarization. Only the oracle accepts non-circular fields.
    pub fn from_polarization(e: CVec3) -> Self {
        let intensity = e.iter().map(|c| c.norm_sqr()).sum();
        PhotonField { e, intensity, omega: None }
    }

    /// Photon energy, carried as metadata only.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    pub fn polarization(&self) -> &CVec3 {
        &self.e
    }

    /// `|E|^2`.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// Photon spin vector `Xi = -i (E* x E)`, real.
    pub fn photon_spin(&self) -> Vec3 {
        let c = self.e.map(|z| z.conj()).cross(&self.e);
        // -i (a + ib) = b - ia
        Vec3::new(c.x.im, c.y.im, c.z.im)
    }

    /// Sign of `Xi . z`, if nonzero.
    pub fn helicity(&self) -> Option<Helicity> {
        let xz = self.photon_spin().z;
        if xz > 0.0 {
            Some(Helicity::Plus)
        } else if xz < 0.0 {
            Some(Helicity::Minus)
        } else {
            None
        }
    }

    /// Opposite helicity, `E -> E*`.
    pub fn flipped(&self) -> Self {
        PhotonField {
            e: self.e.map(|z| z.conj()),
            intensity: self.intensity,
            omega: self.omega,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PhotonField {
            e: self.e.map(|z| z * c),
            intensity: self.intensity * c.norm_sqr(),
            omega: self.omega,
        }
    }

    pub fn rotated(&self, r: &crate::Mat3) -> Self {
        PhotonField {
            e: crate::rotate_complex(r, &self.e),
            intensity: self.intensity,
            omega: self.omega,
        }
    }

    /// True when `Re(E_a E_b*) = |E|^2/2` on the xy block and `E_z = 0`.
    pub fn is_circular_xy(&self) -> bool {
        let i = self.intensity();
        let tol = CIRCULAR_TOLERANCE * i.max(f64::MIN_POSITIVE);
        let [ex, ey, ez] = [self.e.x, self.e.y, self.e.z];
        ez.norm_sqr() <= tol
            && (ex.norm_sqr() - ey.norm_sqr()).abs() <= tol
            && (ex * ey.conj()).re.abs() <= tol
    }
}

/// Molecular spin quantization axis: `sigma_mu = 2 mu zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinQuantizationAxis {
    zeta: Direction,
}

impl SpinQuantizationAxis {
    /// The molecular z axis, used throughout the crate.
    pub const MOLECULAR_Z: SpinQuantizationAxis = SpinQuantizationAxis { zeta: Direction::Z };

    pub fn zeta(&self) -> Vec3 {
        self.zeta.vec()
    }

    pub fn sigma(&self, spin: Spin) -> Vec3 {
        self.zeta.vec() * spin.sign()
    }
}

/// A lab-frame current and the molecular scalar it is proportional to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Current {
    pub vector: Vec3,
    pub factor: f64,
}

/// Shell integrals that do not depend on the photon or the detector axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolecularFactors {
    /// `1/6 int k . B_+`
    pub pecd: f64,
    /// `1/12 int sigma . (B_- x k)`
    pub cross: f64,
    /// `1/15 int I_2`
    pub par: f64,
    /// `1/20 int I_-3`
    pub perp: f64,
    /// `sum_mu int |D_mu|^2`
    pub norm_sum: f64,
}

fn combined_integrand(d_up: &CVec3, d_down: &CVec3, kvec: &Vec3, sigma: &Vec3, lambda: f64) -> f64 {
    let kc = complexify(kvec);
    let sc = complexify(sigma);
    let ks = kvec.dot(sigma);
    let term = |d: &CVec3| {
        let geom = (d.dot(&kc) * d.map(|z| z.conj()).dot(&sc)).re;
        d.norm_squared() * ks - geom / lambda
    };
    term(d_up) - term(d_down)
}

/// `I_L(k)`: the spin-weight difference times `k . sigma`, without division.
pub fn spin_weight_integrand(d: &PartialWaveDipole, lambda: f64, dir: &Direction) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let [du, dd] = d.evaluate_both(dir);
    let sigma = SpinQuantizationAxis::MOLECULAR_Z.sigma(Spin::Up);
    Ok(combined_integrand(&du, &dd, &(dir.vec() * d.k()), &sigma, lambda))
}

/// Geometry factor `R_L` of one spin channel, in ratio form.
///
/// Diagnostic only: rejects directions with `|khat . sigma| < 1e-10` and
/// channels with vanishing amplitude.
pub fn geometry_factor(d: &PartialWaveDipole, spin: Spin, lambda: f64, dir: &Direction) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let sigma = SpinQuantizationAxis::MOLECULAR_Z.sigma(Spin::Up);
    let cos = dir.vec().dot(&sigma);
    if cos.abs() < RATIO_GUARD {
        return Err(Error::SingularGeometry(cos));
    }
    let dv = d.evaluate(spin, dir);
    let n2 = dv.norm_squared();
    if n2 == 0.0 {
        return Err(Error::InvalidDipole("geometry factor undefined for a vanishing amplitude".into()));
    }
    let kvec = dir.vec() * d.k();
    let geom = (dv.dot(&complexify(&kvec)) * dv.map(|z| z.conj()).dot(&complexify(&sigma))).re;
    Ok(1.0 - geom / (lambda * n2 * kvec.dot(&sigma)))
}

/// Spin-weight difference `W_L = R_L,up |D_up|^2 - R_L,down |D_down|^2`.
pub fn spin_weight(d: &PartialWaveDipole, lambda: f64, dir: &Direction) -> Result<f64> {
    let [du, dd] = d.evaluate_both(dir);
    let up = geometry_factor(d, Spin::Up, lambda, dir)? * du.norm_squared();
    let down = geometry_factor(d, Spin::Down, lambda, dir)? * dd.norm_squared();
    Ok(up - down)
}

/// Band limit of a sphere grid that makes every shell integral here exact.
pub fn shell_grid_band(lmax: usize) -> usize {
    lmax + 1
}

/// All four molecular factors and the norm sum in one pass over `grid`.
pub fn molecular_factors(d: &PartialWaveDipole, grid: &SphereGrid) -> Result<MolecularFactors> {
    grid.require_degree(2 * d.lmax() + 1)?;
    let sigma = SpinQuantizationAxis::MOLECULAR_Z.sigma(Spin::Up);
    let k = d.k();
    let (mut pecd, mut cross, mut i2, mut im3, mut norm_sum) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (node, &w) in grid.nodes().iter().zip(grid.weights()) {
        let [du, dd] = d.evaluate_both(node);
        let bu = propensity(&du);
        let bd = propensity(&dd);
        let kvec = node.vec() * k;
        let b_plus = (bu + bd) * 0.5;
        let b_minus = (bu - bd) * 0.5;
        pecd += kvec.dot(&b_plus) * w;
        cross += sigma.dot(&b_minus.cross(&kvec)) * w;
        i2 += combined_integrand(&du, &dd, &kvec, &sigma, 2.0) * w;
        im3 += combined_integrand(&du, &dd, &kvec, &sigma, -3.0) * w;
        norm_sum += (du.norm_squared() + dd.norm_squared()) * w;
    }
    Ok(MolecularFactors {
        pecd: pecd / 6.0,
        cross: cross / 12.0,
        par: i2 / 15.0,
        perp: im3 / 20.0,
        norm_sum,
    })
}

fn require_circular(ph: &PhotonField) -> Result<()> {
    if ph.is_circular_xy() {
        Ok(())
    } else {
        Err(Error::UnsupportedPolarization)
    }
}

fn pecd_from(m: &MolecularFactors, ph: &PhotonField) -> Current {
    Current {
        vector: ph.photon_spin() * m.pecd,
        factor: m.pecd,
    }
}

fn cross_from(m: &MolecularFactors, ph: &PhotonField, s: &Direction) -> Current {
    Current {
        vector: s.vec().cross(&ph.photon_spin()) * m.cross,
        factor: m.cross,
    }
}

fn par_from(m: &MolecularFactors, ph: &PhotonField, s: &Direction) -> Current {
    let z = Vec3::z();
    Current {
        vector: z * (m.par * ph.intensity() * s.vec().dot(&z)),
        factor: m.par,
    }
}

fn perp_from(m: &MolecularFactors, ph: &PhotonField, s: &Direction) -> Current {
    let sv = s.vec();
    let in_plane = Vec3::new(sv.x, sv.y, 0.0);
    Current {
        vector: in_plane * (m.perp * ph.intensity()),
        factor: m.perp,
    }
}

/// PECD current, the flux of `B_+` through the energy shell along `Xi`.
pub fn pecd_current(d: &PartialWaveDipole, ph: &PhotonField, grid: &SphereGrid) -> Result<Current> {
    Ok(pecd_from(&molecular_factors(d, grid)?, ph))
}

/// Spin vortex current along `s x Xi`.
pub fn j_cross(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction, grid: &SphereGrid) -> Result<Current> {
    Ok(cross_from(&molecular_factors(d, grid)?, ph, s))
}

/// Spin current along the light propagation axis.
pub fn j_parallel(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction, grid: &SphereGrid) -> Result<Current> {
    require_circular(ph)?;
    Ok(par_from(&molecular_factors(d, grid)?, ph, s))
}

/// Spin current along the in-plane projection of the detection axis.
pub fn j_perp(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction, grid: &SphereGrid) -> Result<Current> {
    require_circular(ph)?;
    Ok(perp_from(&molecular_factors(d, grid)?, ph, s))
}

/// Total yield `N = 1/6 (sum_mu int |D_mu|^2) |E|^2`.
pub fn total_yield(d: &PartialWaveDipole, ph: &PhotonField, grid: &SphereGrid) -> Result<f64> {
    Ok(molecular_factors(d, grid)?.norm_sum * ph.intensity() / 6.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSet {
    pub k: f64,
    pub helicity: Option<Helicity>,
    pub spin_axis: Direction,
    pub pecd: Current,
    pub cross: Current,
    pub par: Current,
    pub perp: Current,
    pub total_yield: f64,
}

impl CurrentSet {
    /// `j_s = j_cross + j_par + j_perp`.
    pub fn spin_current(&self) -> Vec3 {
        self.cross.vector + self.par.vector + self.perp.vector
    }

    /// `|j| / N` for (pecd, cross, par, perp); `None` when `N = 0`.
    pub fn normalized(&self) -> Option<[f64; 4]> {
        if self.total_yield > 0.0 {
            let n = self.total_yield;
            Some([
                self.pecd.vector.norm() / n,
                self.cross.vector.norm() / n,
                self.par.vector.norm() / n,
                self.perp.vector.norm() / n,
            ])
        } else {
            None
        }
    }
}

pub fn current_set(d: &PartialWaveDipole, ph: &PhotonField, s: &Direction, grid: &SphereGrid) -> Result<CurrentSet> {
    require_circular(ph)?;
    let m = molecular_factors(d, grid)?;
    Ok(CurrentSet {
        k: d.k(),
        helicity: ph.helicity(),
        spin_axis: *s,
        pecd: pecd_from(&m, ph),
        cross: cross_from(&m, ph, s),
        par: par_from(&m, ph, s),
        perp: perp_from(&m, ph, s),
        total_yield: m.norm_sum * ph.intensity() / 6.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::Axis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid_for(d: &PartialWaveDipole) -> SphereGrid {
        SphereGrid::new(shell_grid_band(d.lmax()))
    }

    fn unit(x: f64, y: f64, z: f64) -> Direction {
        Direction::normalize(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn photon_spin_of_circular_field() {
        for (h, s) in [(Helicity::Plus, 1.0), (Helicity::Minus, -1.0)] {
            let ph = PhotonField::circular(h, 2.5).unwrap();
            assert!((ph.photon_spin() - Vec3::new(0.0, 0.0, 2.5 * s)).norm() < 1e-12);
            assert_eq!(ph.intensity(), 2.5);
            assert_eq!(ph.helicity(), Some(h));
            assert!(ph.is_circular_xy());
            assert_eq!(ph.flipped().helicity(), Some(h.flipped()));
        }
        let linear = PhotonField::from_polarization(CVec3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(linear.photon_spin(), Vec3::zeros());
        assert!(!linear.is_circular_xy());
    }

    #[test]
    fn single_component_dipole_has_no_pecd() {
        let mut d = PartialWaveDipole::zeros(1.0, 2).unwrap();
        d.set_coeff(Axis::X, Spin::Up, 2, -2, c(0.3, 0.2)).unwrap();
        d.set_coeff(Axis::X, Spin::Up, 1, 0, c(-0.7, 0.5)).unwrap();
        let ph = PhotonField::circular(Helicity::Plus, 1.0).unwrap();
        let j = pecd_current(&d, &ph, &grid_for(&d)).unwrap();
        assert_eq!(j.vector, Vec3::zeros());
    }

    #[test]
    fn helicity_flip_reverses_pecd_and_cross_only() {
        let d = PartialWaveDipole::random(7, 2, 1.0).unwrap();
        let g = grid_for(&d);
        let s = unit(1.0, 0.3, 0.5);
        let p = PhotonField::circular(Helicity::Plus, 1.0).unwrap();
        let m = PhotonField::circular(Helicity::Minus, 1.0).unwrap();
        let a = current_set(&d, &p, &s, &g).unwrap();
        let b = current_set(&d, &m, &s, &g).unwrap();
        assert_eq!(a.pecd.vector, -b.pecd.vector);
        assert_eq!(a.cross.vector, -b.cross.vector);
        assert_eq!(a.par.vector, b.par.vector);
        assert_eq!(a.perp.vector, b.perp.vector);
    }

    #[test]
    fn axis_geometry() {
        let d = PartialWaveDipole::random(7, 2, 1.0).unwrap();
        let g = grid_for(&d);
        let ph = PhotonField::circular(Helicity::Plus, 1.0).unwrap();
        let along_z = current_set(&d, &ph, &Direction::Z, &g).unwrap();
        assert_eq!(along_z.cross.vector, Vec3::zeros());
        assert_eq!(along_z.perp.vector, Vec3::zeros());
        assert_eq!(along_z.spin_current(), along_z.par.vector);
        let along_x = current_set(&d, &ph, &Direction::X, &g).unwrap();
        assert_eq!(along_x.par.vector, Vec3::zeros());
        assert_eq!(along_x.perp.vector.y, 0.0);
        assert_eq!(along_x.perp.vector.z, 0.0);
        // s = x, xi = +1: s x Xi = x x z = -y
        assert!(along_x.cross.vector.x == 0.0 && along_x.cross.vector.z == 0.0);
        assert!((along_x.cross.vector.y + along_x.cross.factor).abs() < 1e-15);
    }

    #[test]
    fn identical_spin_channels_give_no_spin_currents() {
        let mut d = PartialWaveDipole::random(3, 2, 1.0).unwrap();
        for (q, _, l, m, v) in d.clone().terms().filter(|t| t.1 == Spin::Up).collect::<Vec<_>>() {
            d.set_coeff(q, Spin::Down, l, m, v).unwrap();
        }
        let f = molecular_factors(&d, &grid_for(&d)).unwrap();
        assert_eq!(f.cross, 0.0);
        assert_eq!(f.par, 0.0);
        assert_eq!(f.perp, 0.0);
        for i in 0..10 {
            let dir = Direction::from_angles(0.3 * i as f64, 0.7 * i as f64);
            assert_eq!(spin_weight_integrand(&d, 2.0, &dir).unwrap(), 0.0);
        }
    }

    #[test]
    fn integrand_vanishes_for_transverse_geometry() {
        // D along z, khat in the xy plane: D . k = 0 and k . sigma = 0
        let mut d = PartialWaveDipole::zeros(1.3, 1).unwrap();
        d.set_coeff(Axis::Z, Spin::Up, 0, 0, c(0.8, -0.1)).unwrap();
        d.set_coeff(Axis::Z, Spin::Down, 1, 1, c(0.2, 0.4)).unwrap();
        let dir = Direction::from_angles(std::f64::consts::FRAC_PI_2, 0.8);
        assert!(spin_weight_integrand(&d, 2.0, &dir).unwrap().abs() < 1e-16);
        assert!(spin_weight_integrand(&d, -3.0, &dir).unwrap().abs() < 1e-16);
    }

    #[test]
    fn integrand_equals_two_step_evaluation() {
        let d = PartialWaveDipole::random(13, 3, 0.9).unwrap();
        let dir = Direction::from_angles(0.7, 1.9);
        for lambda in [2.0, -3.0] {
            let direct = spin_weight_integrand(&d, lambda, &dir).unwrap();
            let two_step = spin_weight(&d, lambda, &dir).unwrap() * d.k() * dir.vec().z;
            assert!((direct - two_step).abs() < 1e-12, "{direct} vs {two_step}");
        }
        assert!(matches!(spin_weight_integrand(&d, 0.0, &dir), Err(Error::ZeroLambda)));
        let equator = Direction::from_angles(std::f64::consts::FRAC_PI_2, 0.1);
        assert!(matches!(geometry_factor(&d, Spin::Up, 2.0, &equator), Err(Error::SingularGeometry(_))));
    }

    #[test]
    fn constant_z_dipole_yield() {
        let mut d = PartialWaveDipole::zeros(1.0, 1).unwrap();
        d.set_coeff(Axis::Z, Spin::Up, 0, 0, c(1.0, 0.0)).unwrap();
        let ph = PhotonField::circular(Helicity::Plus, 1.0).unwrap();
        let n = total_yield(&d, &ph, &grid_for(&d)).unwrap();
        assert!((n - 1.0 / 6.0).abs() < 1e-15);
        let zero = PartialWaveDipole::zeros(1.0, 2).unwrap();
        assert_eq!(total_yield(&zero, &ph, &grid_for(&zero)).unwrap(), 0.0);
        let set = current_set(&zero, &ph, &Direction::Z, &grid_for(&zero)).unwrap();
        assert_eq!(set.normalized(), None);
    }

    #[test]
    fn quadratic_in_field_amplitude() {
        let d = PartialWaveDipole::random(17, 2, 1.0).unwrap();
        let g = grid_for(&d);
        let s = unit(0.2, -0.5, 0.8);
        let ph = PhotonField::circular(Helicity::Minus, 1.0).unwrap();
        let scale = c(0.6, 1.7);
        let a = current_set(&d, &ph, &s, &g).unwrap();
        let b = current_set(&d, &ph.scaled(scale), &s, &g).unwrap();
        let f = scale.norm_sqr();
        for (x, y) in [
            (a.pecd.vector, b.pecd.vector),
            (a.cross.vector, b.cross.vector),
            (a.par.vector, b.par.vector),
            (a.perp.vector, b.perp.vector),
        ] {
            assert!((x * f - y).norm() <= 1e-12 * y.norm().max(1.0));
        }
        assert!((a.total_yield * f - b.total_yield).abs() < 1e-12 * b.total_yield);
    }

    #[test]
    fn non_circular_field_rejected_for_split_currents() {
        let d = PartialWaveDipole::random(1, 1, 1.0).unwrap();
        let g = grid_for(&d);
        let lin = PhotonField::from_polarization(CVec3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(matches!(j_parallel(&d, &lin, &Direction::Z, &g), Err(Error::UnsupportedPolarization)));
        assert!(pecd_current(&d, &lin, &g).is_ok());
    }

    #[test]
    fn coarse_grid_rejected() {
        let d = PartialWaveDipole::random(1, 3, 1.0).unwrap();
        assert!(matches!(
            molecular_factors(&d, &SphereGrid::new(2)),
            Err(Error::InsufficientBand { .. })
        ));
    }
}
