//! Upper bounds on the algebraic degree of round-reduced Gleeok-128 and the
//! integral distinguishers they imply.
//!
//! A round's degree is the degree of its Sbox layer. After `r` rounds the
//! bound is the product bound `deg(F)^r`, refined by the Carlet bound
//! `n - ceil((n - deg(G)) / deg(F^-1))` once that is smaller, and capped at
//! `n - 1` because the branches are permutations.

mod error;
mod integral;
mod profile;

pub use error::DegreeError;
pub use integral::{derive_integral_distinguishers, render_distinguishers, IntegralDistinguisher};
pub use profile::{
    carlet_step, degree_profile, layer_degrees, DegreeProfile, LayerDegrees, Provenance, STATE_BITS,
};
