use thiserror::Error;

use crate::expr::ExprError;

/// Crate-wide error type for the geometry, condition, and measure pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    /// A point, tangent, or parameter violated a geometric precondition.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A chart was evaluated outside its admissible domain.
    #[error("chart domain error: {0}")]
    ChartDomain(String),

    /// An iterative or ODE computation failed to converge or degenerated.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A requested scan or fit was given an invalid configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A condition-check precondition was not met (e.g. a pipeline stage
    /// refusing input that fails an earlier check).
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub fn chart(msg: impl Into<String>) -> Self {
        Error::ChartDomain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
