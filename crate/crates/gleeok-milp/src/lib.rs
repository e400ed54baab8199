//! Trail models for Gleeok-128 as mixed-integer programs.
//!
//! [`build_trail_model`] instantiates the embedded Sbox inequality systems
//! over a branch (or all three, for the PRF) and links rounds with XOR
//! constraints for the linear layer. Models are exported in CPLEX LP
//! format and solved either by [`BruteForceBackend`] for toy instances or
//! by an external solver through [`SolverAdapter`].
//!
//! ```
//! use gleeok_milp::{build_trail_model, collect_optimal_pairs, Analysis, BruteForceBackend, ModelTarget, RoundConfig};
//! use gleeok_sbox::SboxName;
//!
//! let model = build_trail_model(ModelTarget::Toy(SboxName::S3), Analysis::DlStage1(RoundConfig::new(0, 0))).unwrap();
//! let pairs = collect_optimal_pairs(&model, &BruteForceBackend::default(), 64).unwrap();
//! assert_eq!(pairs.pairs.len(), 7);
//! ```

mod backend;
mod build;
mod error;
mod lp;
mod program;
mod search;
mod solution;

pub use backend::{
    BruteForceBackend, MilpBackend, Optimum, SolverAdapter, DEFAULT_POOL_CAP, SOLVER_ENV,
};
pub use build::{
    build_trail_model, refine_to_signed, sbox_slots, Analysis, ModelMeta, ModelTarget, RoundConfig,
    SboxBlock, TrailModel, TrailPair, MAX_ROUNDS,
};
pub use error::MilpError;
pub use lp::{read_lp, write_lp};
pub use program::{Constraint, MilpProgram, Sense, Solution, Terms, VarKind, Variable, PIN_NAME};
pub use search::{
    aggregate_correlation, collect_optimal_pairs, select_best_distinguisher, two_stage_search,
    Aggregate, DlSearchReport, PairCollection, SearchOptions, WeightClass, DEFAULT_SPAN,
};
pub use solution::{parse_solutions, write_solutions, SolutionSet};
