use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("t = {t} lies beyond the tabulated range (t_max = {t_max})")]
    BeyondGrid { t: f64, t_max: f64 },

    #[error("magnitude guard tripped at n = {n}: value {value:e} exceeds {limit:e}")]
    Overflow { n: usize, value: f64, limit: f64 },

    #[error("memory budget exceeded: {required} cells requested, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("only {accepted} conditioned samples accepted (need at least {required}); increase the sample budget")]
    InsufficientAcceptance { accepted: usize, required: usize },

    #[error("invalid disorder specification: {0}")]
    InvalidDisorder(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
