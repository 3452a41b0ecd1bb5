use thiserror::Error;

/// Errors raised by the store and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("position {pos} out of bounds (length {len})")]
    OutOfBounds { pos: u64, len: u64 },

    #[error("{0} not found")]
    NotFound(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("`{0}` already exists")]
    AlreadyExists(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("corrupt database: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_bounds(pos: impl TryInto<u64>, len: impl TryInto<u64>) -> Error {
    Error::OutOfBounds {
        pos: pos.try_into().unwrap_or(u64::MAX),
        len: len.try_into().unwrap_or(u64::MAX),
    }
}
