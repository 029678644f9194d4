use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("symbol {symbol} at position {position} is outside an alphabet of size {alphabet}")]
    SymbolOutOfRange {
        position: usize,
        symbol: u32,
        alphabet: u32,
    },

    #[error("position {position} is out of range 1..={n}")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("{what} needs {needed} entries, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input is outside the domain of the function")]
    NotInDomain,

    #[error("operation requires a total function")]
    Partial,

    #[error("operation requires a symmetric function")]
    NotSymmetric,

    #[error("operation requires a Boolean alphabet")]
    NotBoolean,

    #[error("operation is not supported for this kind of function: {0}")]
    Unsupported(String),

    #[error("candidate is infeasible: {0}")]
    Infeasible(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
