use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error in `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    /// An explicit sequence is too short for the requested prefix.
    #[error("length error: requested {requested} terms but only {available} are available")]
    Length { requested: usize, available: usize },

    /// Input data violates a structural invariant (ordering, range).
    #[error("validation error: {0}")]
    Validation(String),

    /// Arguments are individually valid but do not fit together.
    #[error("contract error: {0}")]
    Contract(String),

    /// The lower-bound chain needs eps < 1/2.
    #[error("bound-path error: eps = {eps} must be below 1/2 for the growth coefficient to be positive")]
    BoundPath { eps: f64 },
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
