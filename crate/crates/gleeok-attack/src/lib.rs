//! Integral key recovery on round-reduced Gleeok-128.
//!
//! One Sbox layer of Branch3 is prepended to a degree-based distinguisher.
//! A gadget set fixes one output bit of a single Sbox so the set at the Sbox
//! output stays affine; guessing that Sbox's four whitening-key bits and
//! testing each structure for balance separates the right nibble from most
//! wrong ones. The crate runs a scaled version end to end and reports the
//! full-size complexities.

mod complexity;
mod error;
mod gadget;
mod recovery;

pub use complexity::{complexity_report, render_power, AttackVariant, ComplexityReport, Term};
pub use error::AttackError;
pub use gadget::{
    balance_survivors, brute_force_survival, gadget_set, gadget_sets, survival_analysis, GadgetSet,
};
pub use recovery::{
    build_structure, gadget_fan_in, hex_list, run_key_recovery, whitening_master_bits,
    whitening_nibble, AttackConfig, BalanceArgument, CipherOracle, DataShape, FaultyOracle,
    GuessOutcome, Oracle, RandomOracle, RecoveryTranscript,
};
