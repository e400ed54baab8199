use gleeok_cipher::CipherError;
use gleeok_sbox::SboxError;
use gleeok_stats::StatsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("gadget sets need a bijective 4-bit Sbox")]
    UnsuitableSbox,
    #[error("gadget index {0} is not an output bit of a 4-bit Sbox")]
    GadgetIndex(usize),
    #[error("target Sbox {0} outside 1..=32")]
    TargetSbox(usize),
    #[error(
        "oracle answers {oracle}-round queries but the attack is configured for {config} rounds"
    )]
    OracleRounds { oracle: usize, config: usize },
    #[error("{active} fully-active plaintext bits leave branch1/branch2 unbalanced: their {rounds}-round degree is {degree}")]
    OuterMargin {
        active: usize,
        rounds: usize,
        degree: usize,
    },
    #[error("a {dimension}-dimensional set at the Sbox output does not exceed the branch3 degree {degree} after {rounds} rounds")]
    InnerMargin {
        dimension: usize,
        rounds: usize,
        degree: usize,
    },
    #[error("total round count {0} must be at least 2")]
    TooFewRounds(usize),
    #[error(transparent)]
    Sbox(#[from] SboxError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}
