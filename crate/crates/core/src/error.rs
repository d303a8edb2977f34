use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spatial dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported spatial dimension {0} (expected 1 or 3)")]
    UnsupportedDimension(usize),

    #[error("division by the zero operator")]
    ZeroDivisor,

    #[error("operator parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operator has time derivatives where a purely spatial operator is required")]
    TimeDerivativeInSpatialOp,

    #[error("operator has no time derivative; no causal dynamics")]
    NoDynamics,

    #[error("degenerate mode: leading time coefficient vanishes at k = {0:?}")]
    DegenerateMode(Vec<f64>),

    #[error("grid mismatch")]
    GridMismatch,

    #[error("field must be in physical space")]
    NotPhysical,

    #[error("trajectory carries time derivatives up to order {available}, order {required} is required")]
    InsufficientOrder { required: usize, available: usize },

    #[error("expected {expected} initial fields, got {got}")]
    WrongIcCount { expected: usize, got: usize },

    #[error("memory terms cannot be mapped to initial data")]
    MemoryTermsPresent,

    #[error("instability in oracle stepping at mode {mode}: magnitude {magnitude:e}")]
    Unstable { mode: usize, magnitude: f64 },

    #[error("sample times must be uniformly spaced")]
    NonUniformTimes,

    #[error("test field touches the boundary margin")]
    TestFieldOnBoundary,

    #[error("requested derivative order exceeds resolvable bandwidth (spectral tail {tail:e})")]
    Unresolved { tail: f64 },

    #[error("density error: {0}")]
    Density(String),

    #[error("unknown case: {0}")]
    UnknownCase(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
