use thiserror::Error;

/// Errors raised by the correlation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Hermitian eigendecomposition did not converge")]
    EigenFailure,

    #[error("state has rank {0}, at most 2 is supported")]
    RankTooLarge(usize),

    #[error("no sign change bracketed in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
