use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A construction the theory guarantees could not be carried out; this
    /// points at a bug rather than at bad data.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("no suitable modular prime found: {0}")]
    ModularPrime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
