use thiserror::Error;

/// Errors raised by state constructors, operator builders and Bell functionals.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("operator is not hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("setting kind mismatch: expected {expected}")]
    SettingKind { expected: &'static str },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("non-finite functional value {value} at {point:?}")]
    NonFinite { value: f64, point: Vec<f64> },

    #[error("{0}")]
    EmptyGrid(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
