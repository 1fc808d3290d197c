use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular momentum pair (l = {l}, m = {m}): |m| must not exceed l")]
    InvalidLm { l: usize, m: i32 },

    #[error("vector is not a unit vector (norm = {norm})")]
    NotUnit { norm: f64 },

    #[error("{got} samples given for a grid with {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature grid band limit {have} is below the required {need}")]
    InsufficientBand { have: usize, need: usize },

    #[error("dipole selection rule violated: bound l = {bound}, continuum l = {continuum}")]
    SelectionRule { bound: usize, continuum: usize },

    #[error("invalid channel specification: {0}")]
    ChannelSpec(String),

    #[error("invalid dipole: {0}")]
    InvalidDipole(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("spin-weight parameter must be nonzero")]
    ZeroLambda,

    #[error("k.sigma = {0:e} is too close to zero for the ratio form")]
    SingularGeometry(f64),

    #[error("closed-form currents require circular polarization in the xy plane")]
    UnsupportedPolarization,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
