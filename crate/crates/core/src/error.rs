use thiserror::Error;

/// Errors produced by the simulation engines and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("duality map evaluated at its pole (x = 0)")]
    Pole,
    #[error("chain length {0} must be even and at least 4")]
    ChainLength(usize),
    #[error("covariance entry {value} exceeds unit magnitude; state is corrupted")]
    StateCorruption { value: f64 },
    #[error("recorded outcome has zero probability (p = {probability:e})")]
    ImpossibleOutcome { probability: f64 },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("least-squares design matrix is rank deficient (condition {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}
