use crate::model::ValidationReport;
use crate::rational::NumeralError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input document does not match its schema.
    #[error("document: {0}")]
    Document(String),

    #[error(transparent)]
    Numeral(#[from] NumeralError),

    /// A game or profile failed one or more model invariants.
    #[error("invalid input: {0}")]
    Invalid(ValidationReport),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A well-formed question whose answer is negative (no feasible
    /// candidate, unrealizable request, singular system).
    #[error("{0}")]
    Infeasible(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Something that the theory says cannot happen did happen.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 1,
            Error::Document(_)
            | Error::Numeral(_)
            | Error::Invalid(_)
            | Error::Precondition(_)
            | Error::Budget(_) => 2,
            Error::Internal(_) => 3,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
