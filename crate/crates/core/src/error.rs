use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value {value} outside the support of marginal {index}")]
    OutsideSupport { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(
        "low-fidelity response {value:e} at HF point {index} is within the guard threshold {threshold:e}; \
         the mean-of-ratios scaling estimate is unreliable, use the standard-deviation ratio estimator instead"
    )]
    RhoGuard { index: usize, value: f64, threshold: f64 },
    #[error("singular system: {0}")]
    Singular(&'static str),
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),
    #[error("incompatible models: {0}")]
    Incompatible(&'static str),
    #[error("unknown builtin model `{0}`")]
    UnknownBuiltin(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
