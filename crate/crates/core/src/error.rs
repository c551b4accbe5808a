use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The massless field's occupation diverges at zero wave number.
    #[error("infrared divergence: wave number must be nonzero")]
    Divergence,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense superoperator capacity exceeded: {n_atoms} atoms > cap {cap}")]
    Capacity { n_atoms: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("integration failure at step {step} (t = {time}): {reason}")]
    Integration {
        step: usize,
        time: f64,
        reason: String,
    },

    #[error("no root in bracket: {0}")]
    NoRoot(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
