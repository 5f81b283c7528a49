use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),

    /// State left the simplex by more than the clipping tolerance.
    #[error("domain violation at t = {t}: deviation {deviation:e}, state {state:?}")]
    Domain {
        t: f64,
        deviation: f64,
        state: Vec<f64>,
    },

    #[error("tipping point not bracketed for <k> = {k_avg}: {reason}")]
    NotFound { k_avg: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
