use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("support size mismatch: {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("operation not supported for generator `{generator}`: {reason}")]
    Unsupported { generator: String, reason: String },
    #[error("cannot extend `{0}`: needs finite f'(0) and curvature f''(0) in (0, inf)")]
    UnsupportedExtension(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
