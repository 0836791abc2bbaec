use thiserror::Error;

/// Errors raised by the slicing model, the simulator and the optimizer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {actual})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid resource model: {0}")]
    InvalidModel(String),

    #[error("slice type {ty} has no positive resource cost; the feasibility space is unbounded")]
    UnboundedSliceType { ty: usize },

    #[error("slice type {ty} out of range for {types} slice types")]
    SliceTypeOutOfRange { ty: usize, types: usize },

    #[error("strategy code was built for a different decision space")]
    CodebookMismatch,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("{0} baseline is only defined for two slice types")]
    BaselineNeedsTwoTypes(&'static str),

    #[error("decision space has {bits} bits; full search is limited to {limit}")]
    SearchGuard { bits: usize, limit: usize },

    #[error("state is not in the feasibility space: {0:?}")]
    InfeasibleState(Vec<u32>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
