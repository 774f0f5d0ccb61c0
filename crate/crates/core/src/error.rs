use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exact solver was asked to enumerate more points than its cap allows.
    #[error("instance too large for exact mode: {op} got {size} points, cap is {cap}; {hint}")]
    TooLarge {
        op: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "vector is not in the fundamental domain (nonnegative, nonincreasing) at index {index}"
    )]
    NotInFundamentalDomain { index: usize },

    #[error("vector lies outside the unit l^{p} ball: norm {norm}")]
    OutsideBall { norm: f64, p: String },

    /// A parameter combination outside the hypotheses an experiment relies on.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::TooLarge { .. } => "too_large",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotInFundamentalDomain { .. } => "not_in_fundamental_domain",
            Error::OutsideBall { .. } => "outside_ball",
            Error::Hypothesis(_) => "hypothesis",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
