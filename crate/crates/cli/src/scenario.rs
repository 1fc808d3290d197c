//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! spin_axes = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
//!
//! [dipole]
//! source = "channel"          # "file" | "channel" | "random"
//! path = "dipole.csv"         # file: relative to the scenario file
//! seed = 7                    # random
//! lmax = 2                    # random
//!
//! [[dipole.bound]]            # channel: one or two components
//! l = 1
//! m = 1
//! mu = 0.5
//! amplitude = [1.0, 0.0]      # [re, im]
//! channels = [{ l = 0, tau = [0.4, 0.1] }, { l = 2, tau = [1.0, 0.0] }]
//!
//! [photon]
//! xi = 1                      # helicity, +1 or -1
//! intensity = 1.0             # |E|^2
//! omega = 0.5                 # optional, carried into the output
//!
//! [scan]
//! k = [1.0]                   # channel and random; file uses its k blocks
//! phi_mix = [0.0, 0.785]      # channel only
//! signs = ["+", "-"]
//! types = ["p", "c"]
//!
//! [output]
//! format = "csv"              # or "json"
//! path = "out.csv"            # stdout when absent
//! per_n = false               # also emit j/N vectors
//! multipoles = false
//! l_report = 5                # defaults to 2 lmax + 1
//! a_table = false
//! a_lk = 3
//! a_ls = 1
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use spinpecd::currents::{Helicity, PhotonField};
use spinpecd::dipole::{
    channel_dipole, load_dipoles, BoundComponent, ChannelSpec, ContinuumChannel, MixSign, PartialWaveDipole, Spin,
    Superposition,
};
use spinpecd::sphharm::Direction;

/// Largest dipole band limit accepted from a scenario.
pub const MAX_LMAX: usize = 24;
/// Largest multipole reporting band.
pub const MAX_L_REPORT: usize = 64;
const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dipole: DipoleSection,
    pub photon: PhotonSection,
    pub spin_axes: Vec<[f64; 3]>,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    File,
    Channel,
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleSection {
    pub source: SourceKind,
    pub path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub lmax: Option<usize>,
    #[serde(default)]
    pub bound: Vec<BoundSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub l: usize,
    pub m: i32,
    pub mu: f64,
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
    pub channels: Vec<ChannelSection>,
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub l: usize,
    pub tau: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonSection {
    pub xi: i32,
    #[serde(default = "unit_intensity")]
    pub intensity: f64,
    pub omega: Option<f64>,
}

fn unit_intensity() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SignLabel {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SignLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SignLabel::Plus => "+",
            SignLabel::Minus => "-",
        }
    }

    fn mix_sign(self) -> MixSign {
        match self {
            SignLabel::Plus => MixSign::Plus,
            SignLabel::Minus => MixSign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeLabel {
    P,
    C,
}

impl TypeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeLabel::P => "p",
            TypeLabel::C => "c",
        }
    }

    fn superposition(self) -> Superposition {
        match self {
            TypeLabel::P => Superposition::P,
            TypeLabel::C => Superposition::C,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default = "default_k")]
    pub k: Vec<f64>,
    #[serde(default = "default_phi")]
    pub phi_mix: Vec<f64>,
    #[serde(default = "default_signs")]
    pub signs: Vec<SignLabel>,
    #[serde(default = "default_types")]
    pub types: Vec<TypeLabel>,
}

fn default_k() -> Vec<f64> {
    vec![1.0]
}

fn default_phi() -> Vec<f64> {
    vec![0.0]
}

fn default_signs() -> Vec<SignLabel> {
    vec![SignLabel::Plus]
}

fn default_types() -> Vec<TypeLabel> {
    vec![TypeLabel::P]
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            k: default_k(),
            phi_mix: default_phi(),
            signs: default_signs(),
            types: default_types(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub per_n: bool,
    #[serde(default)]
    pub multipoles: bool,
    pub l_report: Option<usize>,
    #[serde(default)]
    pub a_table: bool,
    #[serde(default = "default_a_lk")]
    pub a_lk: usize,
    #[serde(default = "default_a_ls")]
    pub a_ls: usize,
}

fn default_a_lk() -> usize {
    3
}

fn default_a_ls() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            format: Format::Csv,
            path: None,
            per_n: false,
            multipoles: false,
            l_report: None,
            a_table: false,
            a_lk: default_a_lk(),
            a_ls: default_a_ls(),
        }
    }
}

/// Command-line settings that override the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub l_report: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mix {
    pub phi: f64,
    pub sign: SignLabel,
    pub kind: TypeLabel,
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub k: f64,
    pub mix: Option<Mix>,
    pub dipole: PartialWaveDipole,
}

#[derive(Debug, Clone)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub per_n: bool,
    pub multipoles: Option<Option<usize>>,
    pub a_table: Option<(usize, usize)>,
}

/// A validated scenario with every dipole built.
#[derive(Debug, Clone)]
pub struct Plan {
    pub photon: PhotonField,
    pub xi: i32,
    pub axes: Vec<Direction>,
    pub points: Vec<ScanPoint>,
    pub output: Output,
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Invalid(Vec<String>),
}

/// Reads and parses a scenario file.
pub fn read(path: &Path) -> Result<ScenarioFile, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| LoadError::Invalid(vec![format!("{}: {}", path.display(), e.message())]))
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

/// Every schema and physics violation, without building dipoles.
pub fn validate(sc: &ScenarioFile, base: &Path, ov: &Overrides) -> Vec<String> {
    let mut out = Vec::new();

    if sc.spin_axes.is_empty() {
        out.push("spin_axes: at least one spin axis is required".to_string());
    }
    for (i, a) in sc.spin_axes.iter().enumerate() {
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        if !a.iter().copied().all(finite) || (n - 1.0).abs() > UNIT_TOLERANCE {
            out.push(format!("spin_axes[{i}]: spin axis not unit (norm = {n})"));
        }
    }

    if Helicity::from_sign(sc.photon.xi).is_none() {
        out.push(format!("photon.xi: helicity must be +1 or -1, got {}", sc.photon.xi));
    }
    if !(finite(sc.photon.intensity) && sc.photon.intensity >= 0.0) {
        out.push(format!("photon.intensity: must be finite and non-negative, got {}", sc.photon.intensity));
    }
    if let Some(w) = sc.photon.omega {
        if !finite(w) {
            out.push("photon.omega: must be finite".to_string());
        }
    }

    let d = &sc.dipole;
    let uses_k = d.source != SourceKind::File;
    if uses_k {
        if sc.scan.k.is_empty() {
            out.push("scan.k: list must not be empty".to_string());
        }
        for (i, &k) in sc.scan.k.iter().enumerate() {
            if !(finite(k) && k > 0.0) {
                out.push(format!("scan.k[{i}]: must be positive, got {k}"));
            }
        }
    }
    match d.source {
        SourceKind::File => match &d.path {
            None => out.push("dipole.path: required for source = \"file\"".to_string()),
            Some(p) => {
                let full = base.join(p);
                if !full.is_file() {
                    out.push(format!("dipole.path: file {} does not exist", full.display()));
                }
            }
        },
        SourceKind::Random => {
            if ov.seed.or(d.seed).is_none() {
                out.push("dipole.seed: required for source = \"random\"".to_string());
            }
            match d.lmax {
                None => out.push("dipole.lmax: required for source = \"random\"".to_string()),
                Some(0) => out.push("dipole.lmax: must be at least 1".to_string()),
                Some(l) if l > MAX_LMAX => out.push(format!("dipole.lmax: band limit {l} exceeds {MAX_LMAX}")),
                _ => {}
            }
        }
        SourceKind::Channel => {
            if sc.scan.phi_mix.is_empty() {
                out.push("scan.phi_mix: list must not be empty".to_string());
            }
            if sc.scan.signs.is_empty() {
                out.push("scan.signs: list must not be empty".to_string());
            }
            if sc.scan.types.is_empty() {
                out.push("scan.types: list must not be empty".to_string());
            }
            for (i, phi) in sc.scan.phi_mix.iter().enumerate() {
                if !finite(*phi) {
                    out.push(format!("scan.phi_mix[{i}]: must be finite"));
                }
            }
            out.extend(channel_violations(&d.bound));
        }
    }

    let o = &sc.output;
    let l_report = ov.l_report.or(o.l_report);
    if let Some(l) = l_report {
        if l > MAX_L_REPORT {
            out.push(format!("output.l_report: band limit {l} exceeds {MAX_L_REPORT}"));
        }
    }
    if o.a_table && o.a_lk > MAX_L_REPORT {
        out.push(format!("output.a_lk: band limit {} exceeds {MAX_L_REPORT}", o.a_lk));
    }
    if o.a_table && o.a_ls > MAX_L_REPORT {
        out.push(format!("output.a_ls: band limit {} exceeds {MAX_L_REPORT}", o.a_ls));
    }
    let format = ov.format.unwrap_or(o.format);
    let path = ov.out.as_ref().or(o.path.as_ref());
    let sidecars = o.multipoles || l_report.is_some() || o.a_table;
    if format == Format::Csv && sidecars && path.is_none() {
        out.push("output.path: required when multipoles or the A table are written as CSV".to_string());
    }
    out
}

fn channel_violations(bound: &[BoundSection]) -> Vec<String> {
    let mut out = Vec::new();
    if bound.is_empty() {
        out.push("dipole.bound: at least one bound component is required".to_string());
    }
    if bound.len() > 2 {
        out.push(format!("dipole.bound: at most two bound components can be mixed, got {}", bound.len()));
    }
    for (i, b) in bound.iter().enumerate() {
        if b.m.unsigned_abs() as usize > b.l {
            out.push(format!("dipole.bound[{i}]: |m| = {} exceeds l = {}", b.m.abs(), b.l));
        }
        if Spin::from_mu(b.mu).is_none() {
            out.push(format!("dipole.bound[{i}].mu: must be 0.5 or -0.5, got {}", b.mu));
        }
        if !b.amplitude.iter().copied().all(finite) {
            out.push(format!("dipole.bound[{i}].amplitude: must be finite"));
        }
        if b.channels.is_empty() {
            out.push(format!("dipole.bound[{i}].channels: at least one continuum channel is required"));
        }
        for (j, ch) in b.channels.iter().enumerate() {
            if ch.l.abs_diff(b.l) != 1 {
                out.push(format!(
                    "dipole.bound[{i}].channels[{j}]: dipole selection rule requires |l' - l_b| = 1 (l_b = {}, l' = {})",
                    b.l, ch.l
                ));
            }
            if ch.l > MAX_LMAX {
                out.push(format!("dipole.bound[{i}].channels[{j}]: band limit {} exceeds {MAX_LMAX}", ch.l));
            }
            if !ch.tau.iter().copied().all(finite) {
                out.push(format!("dipole.bound[{i}].channels[{j}].tau: must be finite"));
            }
        }
    }
    out
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn channel_spec(bound: &[BoundSection], mix: &Mix) -> ChannelSpec {
    ChannelSpec {
        bound: bound
            .iter()
            .map(|b| BoundComponent {
                l: b.l,
                m: b.m,
                spin: Spin::from_mu(b.mu).unwrap_or(Spin::Up),
                amplitude: complex(b.amplitude),
                channels: b
                    .channels
                    .iter()
                    .map(|c| ContinuumChannel { l: c.l, tau: complex(c.tau) })
                    .collect(),
            })
            .collect(),
        mixing_angle: mix.phi,
        superposition: mix.kind.superposition(),
        sign: mix.sign.mix_sign(),
    }
}

/// Validates and builds every scan point.
pub fn plan(sc: &ScenarioFile, base: &Path, ov: &Overrides) -> Result<Plan, LoadError> {
    let problems = validate(sc, base, ov);
    if !problems.is_empty() {
        return Err(LoadError::Invalid(problems));
    }
    let invalid = |msg: String| LoadError::Invalid(vec![msg]);

    let helicity = Helicity::from_sign(sc.photon.xi).ok_or_else(|| invalid("photon.xi: invalid".into()))?;
    let mut photon = PhotonField::circular(helicity, sc.photon.intensity).map_err(|e| invalid(format!("photon: {e}")))?;
    if let Some(w) = sc.photon.omega {
        photon = photon.with_omega(w);
    }
    let axes = sc
        .spin_axes
        .iter()
        .map(|a| spinpecd::Vec3::new(a[0], a[1], a[2]))
        .map(|v| Direction::normalize(v).ok_or_else(|| invalid("spin_axes: spin axis not unit".into())))
        .collect::<Result<Vec<_>, _>>()?;

    let d = &sc.dipole;
    let mut points = Vec::new();
    match d.source {
        SourceKind::File => {
            let path = base.join(d.path.as_ref().expect("validated"));
            let dipoles = load_dipoles(&path).map_err(|e| match e {
                spinpecd::Error::Io(io) => LoadError::Io(format!("{}: {io}", path.display())),
                other => invalid(format!("dipole.path: {}: {other}", path.display())),
            })?;
            for dip in dipoles {
                if dip.lmax() > MAX_LMAX {
                    return Err(invalid(format!("dipole.path: band limit {} exceeds {MAX_LMAX}", dip.lmax())));
                }
                points.push(ScanPoint { k: dip.k(), mix: None, dipole: dip });
            }
            if points.is_empty() {
                return Err(invalid(format!("dipole.path: {} contains no coefficients", path.display())));
            }
        }
        SourceKind::Random => {
            let seed = ov.seed.or(d.seed).expect("validated");
            let lmax = d.lmax.expect("validated");
            for &k in &sc.scan.k {
                let dip = PartialWaveDipole::random(seed, lmax, k)
                    .map_err(|e| invalid(format!("dipole: {e}")))?
                    .with_label(format!("random seed {seed}"));
                points.push(ScanPoint { k, mix: None, dipole: dip });
            }
        }
        SourceKind::Channel => {
            for &k in &sc.scan.k {
                for &phi in &sc.scan.phi_mix {
                    for &sign in &sc.scan.signs {
                        for &kind in &sc.scan.types {
                            let mix = Mix { phi, sign, kind };
                            let dip = channel_dipole(&channel_spec(&d.bound, &mix), k)
                                .map_err(|e| invalid(format!("dipole.bound: {e}")))?;
                            points.push(ScanPoint { k, mix: Some(mix), dipole: dip });
                        }
                    }
                }
            }
        }
    }

    let o = &sc.output;
    let l_report = ov.l_report.or(o.l_report);
    Ok(Plan {
        photon,
        xi: sc.photon.xi,
        axes,
        points,
        output: Output {
            format: ov.format.unwrap_or(o.format),
            path: ov.out.clone().or_else(|| o.path.clone()),
            per_n: o.per_n,
            multipoles: (o.multipoles || l_report.is_some()).then_some(l_report),
            a_table: o.a_table.then_some((o.a_lk, o.a_ls)),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ScenarioFile {
        toml::from_str(text).unwrap()
    }

    const RANDOM: &str = r#"
spin_axes = [[0.0, 0.0, 1.0]]
[dipole]
source = "random"
seed = 3
lmax = 2
[photon]
xi = 1
"#;

    #[test]
    fn valid_random_scenario_has_empty_report() {
        let sc = parse(RANDOM);
        assert!(validate(&sc, Path::new("."), &Overrides::default()).is_empty());
        let p = plan(&sc, Path::new("."), &Overrides::default()).unwrap();
        assert_eq!(p.points.len(), 1);
        assert_eq!(p.output.format, Format::Csv);
    }

    #[test]
    fn non_unit_axis_reported() {
        let sc = parse(&RANDOM.replace("[[0.0, 0.0, 1.0]]", "[[0.0, 0.0, 2.0], [1.0, 0.0, 0.0]]"));
        let report = validate(&sc, Path::new("."), &Overrides::default());
        assert_eq!(report.len(), 1);
        assert!(report[0].contains("spin axis not unit"), "{report:?}");
        assert!(report[0].starts_with("spin_axes[0]"));
    }

    #[test]
    fn selection_rule_reported() {
        let text = r#"
spin_axes = [[0.0, 0.0, 1.0]]
[dipole]
source = "channel"
[[dipole.bound]]
l = 1
m = 0
mu = 0.5
channels = [{ l = 3, tau = [1.0, 0.0] }]
[photon]
xi = -1
"#;
        let report = validate(&parse(text), Path::new("."), &Overrides::default());
        assert_eq!(report.len(), 1);
        assert!(report[0].contains("dipole selection rule"), "{report:?}");
    }

    #[test]
    fn violations_are_aggregated() {
        let text = r#"
spin_axes = []
[dipole]
source = "random"
lmax = 0
[photon]
xi = 2
intensity = -1.0
[scan]
k = [0.0]
"#;
        let report = validate(&parse(text), Path::new("."), &Overrides::default());
        assert_eq!(report.len(), 6, "{report:?}");
        let with_seed = Overrides { seed: Some(1), ..Overrides::default() };
        assert_eq!(validate(&parse(text), Path::new("."), &with_seed).len(), 5);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = toml::from_str::<ScenarioFile>(&format!("{RANDOM}\n[output]\nformt = \"csv\"\n")).unwrap_err();
        assert!(err.message().contains("formt"), "{}", err.message());
    }

    #[test]
    fn channel_scan_order() {
        let text = r#"
spin_axes = [[0.0, 0.0, 1.0]]
[dipole]
source = "channel"
[[dipole.bound]]
l = 0
m = 0
mu = 0.5
channels = [{ l = 1, tau = [1.0, 0.0] }]
[photon]
xi = 1
[scan]
k = [0.5, 1.0]
phi_mix = [0.0, 0.3]
signs = ["+", "-"]
types = ["p", "c"]
"#;
        let p = plan(&parse(text), Path::new("."), &Overrides::default()).unwrap();
        assert_eq!(p.points.len(), 16);
        let first = p.points[0].mix.unwrap();
        assert_eq!((first.phi, first.sign, first.kind), (0.0, SignLabel::Plus, TypeLabel::P));
        let second = p.points[1].mix.unwrap();
        assert_eq!(second.kind, TypeLabel::C);
        assert_eq!(p.points[8].k, 1.0);
    }
}
