use std::path::PathBuf;

use num_complex::Complex64;
use spinpecd::dipole::{load_dipole, Axis, PartialWaveDipole, Spin};

fn sample_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/sample_dipole.csv")
}

#[test]
fn documented_sample_has_known_coefficient() {
    let d = load_dipole(sample_path()).unwrap();
    assert_eq!(d.k(), 1.25);
    assert_eq!(d.lmax(), 2);
    let c = d.coeff(Axis::Z, Spin::Up, 1, 0).unwrap();
    assert_eq!(c, Complex64::new(9.7769031941126716e-1, 9.2399377424780260e-1));
}

#[test]
fn documented_sample_matches_generator() {
    let d = load_dipole(sample_path()).unwrap();
    let regenerated = PartialWaveDipole::random(2024, 2, 1.25).unwrap().with_label(d.label());
    assert_eq!(d, regenerated);
}
