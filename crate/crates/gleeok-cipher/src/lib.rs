//! Gleeok-128: three keyed SPN branches and their XOR as a PRF.
//!
//! States are [`State128`] values whose bit `x0` is the most significant bit
//! of the 32-hex-digit rendering. Branches can be evaluated over arbitrary
//! half-round [`RoundSpan`]s, which the distinguisher and attack code use to
//! start or stop between the Sbox layer and the linear layer of a round.
//!
//! ```
//! use gleeok_cipher::{BranchId, MasterKey, Prf, State128};
//!
//! let key = MasterKey::default();
//! let prf = Prf::new(&key, 12).unwrap();
//! let c = prf.encrypt(State128::ZERO);
//! let by_hand = BranchId::ALL
//!     .iter()
//!     .map(|&b| prf.branch(b).encrypt(State128::ZERO))
//!     .fold(State128::ZERO, |acc, y| acc ^ y);
//! assert_eq!(c, by_hand);
//! ```

mod branch;
mod constants;
mod error;
mod key;
mod linear;
mod params;
mod sbox;
mod span;
mod state;

pub use branch::{encrypt_branch, encrypt_prf, BranchCipher, Prf, TargetCipher, MAX_ROUNDS};
pub use constants::{
    constant_offset, derive_round_constants, embedded_bits, pi_window, RoundConstantTable,
};
pub use error::{CipherError, ParseHexError};
pub use key::{
    derive_round_keys, permute_key_half, whitening_source_bit, MasterKey, RoundKeySchedule,
};
pub use linear::{
    apply_linear, apply_pi, apply_pi_inverse, apply_theta, ByteSlicedMap, Gf2Matrix128,
};
pub use params::{BranchId, LinearParams, PiParam, SboxLayerKind, Target, ThetaParams};
pub use sbox::{
    apply_layer, apply_sbox_layer, layer_byte_table, Direction, S3, S3_INV, S4, S4_INV, S5, S5_INV,
};
pub use span::RoundSpan;
pub use state::{BitOrder, State128};
