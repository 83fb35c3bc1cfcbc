use thiserror::Error;

/// Failures raised by constructions, the symbolic engine, the simulator and the driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("stacked channel matrix is numerically singular (sigma ratio {ratio:.3e})")]
    SingularStack { ratio: f64 },
    #[error("only {found} usable eigenvectors, {needed} required")]
    NoRealEigenvectors { found: usize, needed: usize },
    #[error("non-generic channel: {0}")]
    GenericityViolation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero beamformer: {0}")]
    ZeroBeamformer(String),
    #[error("symbolic instance too large: {size} directions exceeds cap {cap}")]
    SizeLimit { size: u128, cap: u128 },
    #[error("parameters outside the construction regime: {0}")]
    RegimeMismatch(String),
    #[error("direction collision: {first} and {second}")]
    Collision { first: String, second: String },
    #[error("scheme has {0} failing verification checks")]
    UnverifiedScheme(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("constellation of {size} points exceeds cap {cap}")]
    EnumLimit { size: u128, cap: u128 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidScenario(_) => "INVALID_SCENARIO",
            Error::SingularStack { .. } => "SINGULAR_STACK",
            Error::NoRealEigenvectors { .. } => "NO_REAL_EIGENVECTORS",
            Error::GenericityViolation(_) => "GENERICITY_VIOLATION",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::ZeroBeamformer(_) => "ZERO_BEAMFORMER",
            Error::SizeLimit { .. } => "SIZE_LIMIT",
            Error::RegimeMismatch(_) => "REGIME_MISMATCH",
            Error::Collision { .. } => "COLLISION",
            Error::UnverifiedScheme(_) => "UNVERIFIED_SCHEME",
            Error::DegenerateFit(_) => "DEGENERATE_FIT",
            Error::EnumLimit { .. } => "ENUM_LIMIT",
            Error::Unsupported(_) => "UNSUPPORTED",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
            Error::Json(_) => "JSON",
            Error::Csv(_) => "CSV",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
