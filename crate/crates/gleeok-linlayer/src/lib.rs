//! Branch3 linear-layer tooling: correct mask propagation through θ,
//! diffusion filtering of `(t0, t1, t2, p)` candidates, and a bounded
//! linear-trail search.

mod diffusion;
mod error;
mod mask;
mod scan;
mod trail;

pub use diffusion::{
    diffusion_summary, half_layers, influence_after, original_threshold, passes_diffusion_filters,
    DiffusionConvention, DiffusionKernel, DiffusionSummary, FilterVerdict, HalfLayer, InfluenceMap,
    MAX_HALF_ROUNDS,
};
pub use error::LinLayerError;
pub use mask::{
    direct_rule_violations, linear_transpose, pullback_matrix, theta_mask_direct, theta_transpose,
    MaskRule,
};
pub use scan::{
    all_multipliers, calibrate_convention, enumerate_viable_params, render_candidates,
    ConventionCalibration, ScanReport, EXPECTED_FULL_DIFFUSION, EXPECTED_RETAINED,
};
pub use trail::{
    best_linear_trail, best_linear_trail_with, LinearTrail, TrailCaps, TrailSearch,
    MAX_TRAIL_ROUNDS,
};
