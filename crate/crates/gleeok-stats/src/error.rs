use gleeok_cipher::CipherError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("input difference must be nonzero")]
    ZeroDifference,
    #[error("masks must be nonzero")]
    ZeroMask,
    #[error("sample count must be positive")]
    NoSamples,
    #[error("key count must be positive")]
    NoKeys,
    #[error("job needs 2^{needed_log2:.2} evaluations but the budget is 2^{budget_log2:.2}; raise the budget to at least {needed}")]
    OverBudget {
        needed: u128,
        needed_log2: f64,
        budget_log2: f64,
    },
    #[error("structure has 2^{dimension_log2:.2} elements, more than the 2^{limit_log2} enumeration limit")]
    StructureTooLarge {
        dimension_log2: f64,
        limit_log2: u32,
    },
    #[error("structure positions overlap at bit {0}")]
    Overlap(usize),
    #[error("position {0} is outside the state")]
    OutOfRange(usize),
    #[error("gadget needs 8 distinct 4-bit values")]
    BadGadget,
    #[error(transparent)]
    Cipher(#[from] CipherError),
}
