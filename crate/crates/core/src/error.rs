use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("size error: dimension {requested} exceeds the limit {limit}")]
    Size { requested: usize, limit: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical integrity: {0}")]
    Numerical(String),

    #[error(
        "rejection sampler accepted no state in {attempts} attempts for band [{low}, {high}]; \
         widen the band, change env_dim or adjust the time grid"
    )]
    Yield { attempts: usize, low: f64, high: f64 },

    #[error("invalid state file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
