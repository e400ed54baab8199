use gleeok_cipher::CipherError;
use gleeok_sbox::SboxError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MilpError {
    #[error("round configuration {rd}+1+{rl} does not add up to {rounds} rounds")]
    RoundSplit { rd: usize, rl: usize, rounds: usize },
    #[error("round count {0} outside 1..=12")]
    Rounds(usize),
    #[error("{0} is only defined for a single round")]
    ToyRounds(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` is used but not declared")]
    Undeclared(String),
    #[error("integer variable `{name}` has empty range {lower}..={upper}")]
    EmptyRange {
        name: String,
        lower: i64,
        upper: i64,
    },
    #[error("LP line {line}: {message}")]
    Lp { line: usize, message: String },
    #[error("solution line {line}: {message}")]
    Solution { line: usize, message: String },
    #[error("expected a differential-linear stage-one model")]
    NotDlModel,
    #[error("pair has {got} bits per side, the model has {expected}")]
    PairWidth { expected: usize, got: usize },
    #[error("brute-force search space of 2^{log2} assignments is too large")]
    TooLarge { log2: u32 },
    #[error("no solver configured: {0}")]
    SolverUnavailable(String),
    #[error("the solver cannot {0}")]
    Capability(&'static str),
    #[error("solver failed (status {status:?}): {message}")]
    SolverFailed {
        status: Option<i32>,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Sbox(#[from] SboxError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

impl From<std::io::Error> for MilpError {
    fn from(e: std::io::Error) -> Self {
        MilpError::Io(e.to_string())
    }
}
