use thiserror::Error;

/// Failure classes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A numerical routine did not converge. `best_estimate` carries whatever
    /// value the routine had reached when it gave up.
    #[error("numeric failure: {message}")]
    NumericFailure {
        message: String,
        best_estimate: Option<f64>,
    },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, best_estimate: Option<f64>) -> Self {
        Error::NumericFailure {
            message: msg.into(),
            best_estimate,
        }
    }
}
