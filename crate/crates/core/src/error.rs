use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid learner state: {0}")]
    InvalidState(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
