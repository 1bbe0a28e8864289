//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point or window falls outside the representable range (e.g. a grid).
    #[error("range error: {0}")]
    Range(String),

    /// A structural parameter is invalid (lengths, margins, flags).
    #[error("configuration error: {0}")]
    Config(String),

    /// An iteration or ladder failed to stabilize; carries the last residual
    /// or the observed sequence.
    #[error("convergence error: {detail} (last residual {last_residual:e})")]
    Convergence { detail: String, last_residual: f64 },

    /// A quadrature could not reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Evaluation requested at a singular point of the function.
    #[error("singular point: {0}")]
    SingularPoint(String),

    /// The metric projection onto the boundary is not unique at this point.
    #[error("non-unique projection: {0}")]
    NonUniqueProjection(String),

    /// Fermi coordinates fold over (offset beyond the reach).
    #[error("fold error: {0}")]
    Fold(String),
}

pub type Result<T> = std::result::Result<T, Error>;
