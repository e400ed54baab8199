use std::fmt;
use std::str::FromStr;

use crate::error::{CipherError, ParseHexError};
use crate::params::BranchId;
use crate::state::{parse_hex_u128, State128};

/// 256-bit master key `k0 ... k255`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MasterKey {
    halves: [State128; 2],
}

impl MasterKey {
    /// `first` holds `k0..k127`, `second` holds `k128..k255`.
    pub const fn from_halves(first: State128, second: State128) -> Self {
        MasterKey {
            halves: [first, second],
        }
    }

    pub const fn halves(&self) -> [State128; 2] {
        self.halves
    }

    pub fn bit(&self, index: usize) -> bool {
        self.halves[(index / 128) & 1].bit(index % 128)
    }

    pub fn set_bit(&mut self, index: usize, value: bool) {
        self.halves[(index / 128) & 1].set_bit(index % 128, value);
    }

    /// Parses exactly 64 hex digits (optional `0x`), `k0` first.
    pub fn from_hex(text: &str) -> Result<Self, ParseHexError> {
        let digits = text.trim();
        let digits = digits.strip_prefix("0x").unwrap_or(digits);
        if digits.is_empty() {
            return Err(ParseHexError::Empty);
        }
        if digits.len() != 64 {
            return Err(ParseHexError::WrongLength {
                digits: digits.len(),
                expected: 64,
            });
        }
        if !digits.is_ascii() {
            let (pos, ch) = digits
                .char_indices()
                .find(|(_, c)| !c.is_ascii())
                .unwrap_or((0, '?'));
            return Err(ParseHexError::BadDigit { ch, pos });
        }
        let hi = parse_hex_u128(&digits[..32])?;
        let lo = parse_hex_u128(&digits[32..]).map_err(|e| match e {
            ParseHexError::BadDigit { ch, pos } => ParseHexError::BadDigit { ch, pos: pos + 32 },
            other => other,
        })?;
        Ok(MasterKey::from_halves(
            State128::from_u128(hi),
            State128::from_u128(lo),
        ))
    }

    pub fn to_hex(&self) -> String {
        format!(
            "{:032x}{:032x}",
            self.halves[0].to_u128(),
            self.halves[1].to_u128()
        )
    }

    /// Initial `(K0, K1)` for a branch before any round permutation.
    pub fn branch_halves(&self, branch: BranchId) -> [State128; 2] {
        let [a, b] = self.halves;
        match branch {
            BranchId::Branch1 => [a, b],
            BranchId::Branch2 => [b, a],
            BranchId::Branch3 => {
                // K0 = k64..k191, K1 = k192..k255 || k0..k63
                let (a, b) = (a.to_u128(), b.to_u128());
                [
                    State128::from_u128((a << 64) | (b >> 64)),
                    State128::from_u128((b << 64) | (a >> 64)),
                ]
            }
        }
    }
}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MasterKey(0x{})", self.to_hex())
    }
}

impl fmt::Display for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl FromStr for MasterKey {
    type Err = ParseHexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MasterKey::from_hex(s)
    }
}

/// Index permutation `j -> pk * j mod 128` applied to a key half:
/// output bit `j` takes input bit `pk*j mod 128`.
pub fn permute_key_half(half: State128, multiplier: usize) -> State128 {
    let mut out = State128::ZERO;
    for j in 0..128 {
        if half.bit((multiplier * j) % 128) {
            out.set_bit(j, true);
        }
    }
    out
}

/// `RK_0 ... RK_R` for one branch; `RK_0` is the whitening key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundKeySchedule {
    branch: BranchId,
    keys: Vec<State128>,
}

impl RoundKeySchedule {
    pub fn branch(&self) -> BranchId {
        self.branch
    }

    pub fn keys(&self) -> &[State128] {
        &self.keys
    }

    pub fn whitening(&self) -> State128 {
        self.keys[0]
    }

    pub fn rounds(&self) -> usize {
        self.keys.len() - 1
    }
}

pub fn derive_round_keys(master: &MasterKey, branch: BranchId, rounds: usize) -> RoundKeySchedule {
    let mut live = master.branch_halves(branch);
    let pk = branch.key_multiplier();
    let mut keys = Vec::with_capacity(rounds + 1);
    for r in 0..=rounds {
        let half = &mut live[r % 2];
        *half = permute_key_half(*half, pk);
        keys.push(*half);
    }
    RoundKeySchedule { branch, keys }
}

/// Master-key bit index feeding whitening bit `index` of the given branch.
pub fn whitening_source_bit(branch: BranchId, index: usize) -> usize {
    let pk = branch.key_multiplier();
    let within = (pk * index) % 128;
    match branch {
        BranchId::Branch1 => within,
        BranchId::Branch2 => 128 + within,
        BranchId::Branch3 => (64 + within) % 256,
    }
}

pub(crate) fn check_rounds(rounds: usize, min: usize, max: usize) -> Result<(), CipherError> {
    if rounds < min || rounds > max {
        return Err(CipherError::RoundCount { rounds, min, max });
    }
    Ok(())
}
