//! Writes the sample dipole shipped in `docs/sample_dipole.csv`.
//!
//! `cargo run -p spinpecd --example sample_dipole > docs/sample_dipole.csv`

use spinpecd::dipole::{write_dipoles, PartialWaveDipole};

fn main() -> spinpecd::Result<()> {
    let d = PartialWaveDipole::random(2024, 2, 1.25)?.with_label("sample: random seed 2024, lmax 2, k 1.25");
    write_dipoles(std::io::stdout().lock(), &[d])
}
