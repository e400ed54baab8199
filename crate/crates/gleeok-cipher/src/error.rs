use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseHexError {
    #[error("empty hex string")]
    Empty,
    #[error("hex string has {digits} digits, at most {max} allowed")]
    TooLong { digits: usize, max: usize },
    #[error("hex string has {digits} digits, exactly {expected} required")]
    WrongLength { digits: usize, expected: usize },
    #[error("invalid hex digit {ch:?} at offset {pos}")]
    BadDigit { ch: char, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("theta offsets must be pairwise distinct and below 128, got {0:?}")]
    ThetaOffsets([usize; 3]),
    #[error("pi multiplier must be odd and in 1..=127, got {0}")]
    PiMultiplier(usize),
    #[error("round count {rounds} outside the supported range {min}..={max}")]
    RoundCount {
        rounds: usize,
        min: usize,
        max: usize,
    },
    #[error("span [{start}, {end}] is malformed for a {rounds}-round schedule")]
    Span {
        start: usize,
        end: usize,
        rounds: usize,
    },
    #[error("embedded pi expansion has {available} bits but {needed} are required")]
    ExpansionTooShort { needed: usize, available: usize },
    #[error(transparent)]
    Hex(#[from] ParseHexError),
}
