//! Statistical and exhaustive checks on Gleeok-128: Monte Carlo DL and
//! linear correlation estimates, null controls, and XOR-sum balance over
//! chosen-plaintext structures.
//!
//! Every random quantity comes from a ChaCha20 stream derived from the run
//! seed, the key index and the sample block, so estimates are reproducible
//! bit for bit whatever the thread count.

mod calibration;
mod error;
mod estimate;
mod rng;
mod structure;

pub use calibration::{
    calibrate_bit_order, order_name, CalibrationReport, CalibrationRow, PublishedDlCase,
    DL_TOLERANCE, PUBLISHED_DL_CASES,
};
pub use error::StatsError;
pub use estimate::{
    derived_key, estimate_dl_correlation, estimate_linear_correlation,
    estimate_linear_correlation_over, exhaustive_dl_correlation, null_bound, null_control,
    CorrelationEstimate, DifferenceMaskPair, EstimateKind, SamplingPlan, DEFAULT_BUDGET_LOG2,
};
pub use rng::{stream, StreamPurpose, BLOCK};
pub use structure::{
    balance_map, check_integral_balance, BalanceMap, GadgetNibble, KeyedRandomFunction,
    PlaintextStructure, ENUMERATION_LIMIT_LOG2,
};
