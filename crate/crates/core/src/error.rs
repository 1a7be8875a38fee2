use thiserror::Error;

/// Errors raised across the inference toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("tape handle is stale: the tape was cleared after this value was recorded")]
    StaleTape,

    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: u64 },

    #[error("non-finite loss at iteration {iteration}")]
    NonFiniteLoss { iteration: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot saturate output layer: {0}")]
    Saturation(String),

    #[error("equilibration not reached within {max_steps} steps (max residual {residual:.3e})")]
    NotEquilibrated { max_steps: usize, residual: f64 },

    #[error("empty ensemble: {0}")]
    EmptyEnsemble(String),

    #[error("malformed {file} at line {line}: {reason}")]
    Parse {
        file: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Shape {
        op,
        detail: detail.into(),
    })
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
