use std::sync::OnceLock;

use crate::error::CipherError;
use crate::params::BranchId;
use crate::state::State128;

/// Hex digits of the fractional part of π (that is, of π − 3).
const PI_FRACTION_HEX: &str = include_str!("../assets/pi_fraction.hex");

/// Number of fractional bits of π available to the constant generator.
pub fn embedded_bits() -> usize {
    pi_digits().len() * 4
}

fn pi_digits() -> &'static [u8] {
    static DIGITS: OnceLock<Vec<u8>> = OnceLock::new();
    DIGITS.get_or_init(|| {
        PI_FRACTION_HEX
            .trim()
            .chars()
            .map(|c| c.to_digit(16).expect("embedded pi expansion is hex") as u8)
            .collect()
    })
}

/// The 128-bit window of the binary expansion of π − 3 starting at
/// fractional bit `offset` (offset 0 is the first bit after the point).
pub fn pi_window(offset: usize) -> Result<State128, CipherError> {
    let available = embedded_bits();
    if offset + 128 > available {
        return Err(CipherError::ExpansionTooShort {
            needed: offset + 128,
            available,
        });
    }
    let digits = pi_digits();
    let acc = (offset..offset + 128).fold(0u128, |acc, pos| {
        (acc << 1) | ((digits[pos / 4] >> (3 - pos % 4)) & 1) as u128
    });
    Ok(State128::from_u128(acc))
}

/// Constants `RC_r` for one branch, `r` counted from 0 at the first round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundConstantTable {
    branch: BranchId,
    constants: Vec<State128>,
}

impl RoundConstantTable {
    pub fn branch(&self) -> BranchId {
        self.branch
    }

    pub fn constants(&self) -> &[State128] {
        &self.constants
    }

    /// Constant added at the end of the 1-based round `round`.
    pub fn for_round(&self, round: usize) -> State128 {
        self.constants[round - 1]
    }
}

/// Fractional-bit offset of `RC_r` for the branch: `128 * (r + 12 * i)`.
pub fn constant_offset(branch: BranchId, r: usize) -> usize {
    128 * (r + 12 * branch.number())
}

pub fn derive_round_constants(
    branch: BranchId,
    rounds: usize,
) -> Result<RoundConstantTable, CipherError> {
    let constants = (0..rounds)
        .map(|r| pi_window(constant_offset(branch, r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RoundConstantTable { branch, constants })
}
