use thiserror::Error;

/// Errors raised by the engine. Mathematical assertion failures are not
/// errors; they are reported through `pass = false` in the relevant report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("coefficient domain mismatch: {0} vs {1}")]
    DomainMismatch(String, String),

    #[error("precondition violated: {0}")]
    Domain(String),

    #[error("modular ranks disagree: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
