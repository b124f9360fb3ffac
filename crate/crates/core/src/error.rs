use thiserror::Error;

#[derive(Debug, Error)]
pub enum FqError {
    #[error("gamma not primitive (gcd {0})")]
    GammaNotPrimitive(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("root on contour")]
    RootOnContour,
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("approximant not real-rooted: {0}")]
    NotRealRooted(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FqError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FqError::InvalidInput(msg.into()))
}
