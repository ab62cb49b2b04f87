use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("matrix is not Hermitian: max |H - H^dagger| = {0:e}")]
    SymmetryViolation(f64),

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("pairing mismatch: {0}")]
    Pairing(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("undefined logarithm: {0}")]
    UndefinedLogarithm(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DegenerateSpectrum(_) => "degenerate_spectrum",
            Error::SymmetryViolation(_) => "symmetry_violation",
            Error::DegenerateProfile(_) => "degenerate_profile",
            Error::Pairing(_) => "pairing",
            Error::ResourceLimit(_) => "resource_limit",
            Error::MalformedInput(_) => "malformed_input",
            Error::OutOfRegime(_) => "out_of_regime",
            Error::UndefinedLogarithm(_) => "undefined_logarithm",
            Error::Configuration(_) => "configuration",
            Error::InvalidWindow(_) => "invalid_window",
            Error::Fit(_) => "fit",
            Error::EmptyInput(_) => "empty_input",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::Linalg(_) => "linalg",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
