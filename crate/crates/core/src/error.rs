use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("zero-mode singularity: {0}")]
    ZeroModeSingularity(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parameter `{name}` = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unresolved field: relative tail energy {tail:.3e} exceeds {limit:.1e}")]
    Unresolved { tail: f64, limit: f64 },

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient angular resolution: {nodes} nodes for phase extent {extent:.1}")]
    InsufficientAngularResolution { nodes: usize, extent: f64 },

    #[error("blow-up or instability at t = {t}, step {step}")]
    BlowUp { t: f64, step: u64 },

    #[error("not a GSF1 file")]
    NotGsf1,

    #[error("GSF1 header parse failure: {0}")]
    HeaderParse(String),

    #[error("payload length mismatch: expected {expected} bytes, found {actual}")]
    PayloadLength { expected: usize, actual: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::OutOfRange {
            name,
            value,
            expected,
        }
    }
}
