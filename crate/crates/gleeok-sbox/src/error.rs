use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SboxError {
    #[error("a {width}-bit Sbox needs {} entries, got {len}", 1usize << width)]
    BadShape { width: usize, len: usize },
    #[error("Sbox value {value:#x} does not fit in {width} bits")]
    ValueOutOfRange { value: u8, width: usize },
    #[error("Sbox is not a bijection")]
    NotBijective,
    #[error("unknown Sbox {0:?}")]
    UnknownSbox(String),
    #[error("exhaustive enumeration over {vars} variables refused (limit {limit})")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("assignment has {got} values but the system has {expected} variables")]
    ArityMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Asset { line: usize, message: String },
}

impl SboxError {
    pub(crate) fn asset(line: usize, message: impl Into<String>) -> Self {
        SboxError::Asset {
            line,
            message: message.into(),
        }
    }
}
