use std::sync::OnceLock;

use crate::constants::derive_round_constants;
use crate::error::CipherError;
use crate::key::{check_rounds, derive_round_keys, MasterKey};
use crate::linear::{apply_linear, ByteSlicedMap, Gf2Matrix128};
use crate::params::{BranchId, Target};
use crate::sbox::{apply_bytes, layer_byte_table, Direction};
use crate::span::RoundSpan;
use crate::state::State128;

pub const MAX_ROUNDS: usize = 12;

struct BranchTables {
    sbox: &'static [u8; 256],
    sbox_inv: &'static [u8; 256],
    linear: ByteSlicedMap,
    linear_inv: ByteSlicedMap,
    round: ByteSlicedMap,
}

impl BranchTables {
    fn build(branch: BranchId) -> Self {
        let params = branch.linear();
        let sbox = layer_byte_table(branch.sbox_layer(), Direction::Forward);
        let sbox_inv = layer_byte_table(branch.sbox_layer(), Direction::Inverse);
        let linear = ByteSlicedMap::new(|x| apply_linear(params, x));
        let inv = Gf2Matrix128::from_map(|x| apply_linear(params, x))
            .inverse()
            .expect("original linear layers are invertible");
        let linear_inv = ByteSlicedMap::new(|x| inv.apply(x));
        let round = linear.with_substitution(sbox);
        BranchTables {
            sbox,
            sbox_inv,
            linear,
            linear_inv,
            round,
        }
    }
}

fn tables(branch: BranchId) -> &'static BranchTables {
    static TABLES: OnceLock<[BranchTables; 3]> = OnceLock::new();
    let all = TABLES.get_or_init(|| BranchId::ALL.map(BranchTables::build));
    &all[branch.number() - 1]
}

/// One branch keyed for a fixed number of rounds.
#[derive(Clone)]
pub struct BranchCipher {
    branch: BranchId,
    whitening: u128,
    // round r (1-based) adds round_add[r - 1] = RK_r ^ RC_{r-1}
    round_add: Vec<u128>,
    tables: &'static BranchTables,
}

impl BranchCipher {
    pub fn new(branch: BranchId, master: &MasterKey, rounds: usize) -> Result<Self, CipherError> {
        check_rounds(rounds, 0, MAX_ROUNDS)?;
        let keys = derive_round_keys(master, branch, rounds);
        let constants = derive_round_constants(branch, rounds)?;
        let round_add = (1..=rounds)
            .map(|r| (keys.keys()[r] ^ constants.for_round(r)).to_u128())
            .collect();
        Ok(BranchCipher {
            branch,
            whitening: keys.whitening().to_u128(),
            round_add,
            tables: tables(branch),
        })
    }

    pub fn branch(&self) -> BranchId {
        self.branch
    }

    pub fn rounds(&self) -> usize {
        self.round_add.len()
    }

    pub fn whitening_key(&self) -> State128 {
        State128::from_u128(self.whitening)
    }

    /// Full keyed permutation: whitening plus every round.
    #[inline]
    pub fn encrypt_raw(&self, mut x: u128) -> u128 {
        x ^= self.whitening;
        for add in &self.round_add {
            x = self.tables.round.apply_raw(x) ^ add;
        }
        x
    }

    pub fn encrypt(&self, plaintext: State128) -> State128 {
        State128::from_u128(self.encrypt_raw(plaintext.to_u128()))
    }

    pub fn decrypt(&self, ciphertext: State128) -> State128 {
        let mut x = ciphertext.to_u128();
        for add in self.round_add.iter().rev() {
            x = self.tables.linear_inv.apply_raw(x ^ add);
            x = apply_bytes(self.tables.sbox_inv, x);
        }
        State128::from_u128(x ^ self.whitening)
    }

    #[inline]
    fn half(&self, x: u128, half: usize) -> u128 {
        if half % 2 == 1 {
            apply_bytes(self.tables.sbox, x)
        } else {
            self.tables.linear.apply_raw(x) ^ self.round_add[half / 2 - 1]
        }
    }

    /// Evaluates `span`; errors if it reaches past the keyed rounds.
    pub fn eval_span(&self, input: State128, span: RoundSpan) -> Result<State128, CipherError> {
        if span.end() > 2 * self.rounds() {
            return Err(CipherError::Span {
                start: span.start(),
                end: span.end(),
                rounds: self.rounds(),
            });
        }
        Ok(State128::from_u128(
            self.eval_span_raw(input.to_u128(), span),
        ))
    }

    /// Like [`eval_span`](Self::eval_span) without the bounds check.
    #[inline]
    pub fn eval_span_raw(&self, mut x: u128, span: RoundSpan) -> u128 {
        if span.whitening() {
            x ^= self.whitening;
        }
        let mut h = span.start() + 1;
        let end = span.end();
        if h <= end && h % 2 == 0 {
            x = self.half(x, h);
            h += 1;
        }
        while h < end {
            x = self.tables.round.apply_raw(x) ^ self.round_add[h.div_ceil(2) - 1];
            h += 2;
        }
        if h == end {
            x = self.half(x, h);
        }
        x
    }
}

/// Evaluates one branch over `span`, keying it for the rounds the span touches.
pub fn encrypt_branch(
    branch: BranchId,
    master: &MasterKey,
    input: State128,
    span: RoundSpan,
) -> Result<State128, CipherError> {
    BranchCipher::new(branch, master, span.rounds_needed())?.eval_span(input, span)
}

/// The three branches keyed by one master key; output is their XOR.
#[derive(Clone)]
pub struct Prf {
    branches: [BranchCipher; 3],
}

impl Prf {
    pub fn new(master: &MasterKey, rounds: usize) -> Result<Self, CipherError> {
        check_rounds(rounds, 1, MAX_ROUNDS)?;
        Ok(Prf {
            branches: [
                BranchCipher::new(BranchId::Branch1, master, rounds)?,
                BranchCipher::new(BranchId::Branch2, master, rounds)?,
                BranchCipher::new(BranchId::Branch3, master, rounds)?,
            ],
        })
    }

    pub fn branch(&self, branch: BranchId) -> &BranchCipher {
        &self.branches[branch.number() - 1]
    }

    pub fn rounds(&self) -> usize {
        self.branches[0].rounds()
    }

    #[inline]
    pub fn encrypt_raw(&self, x: u128) -> u128 {
        self.branches[0].encrypt_raw(x)
            ^ self.branches[1].encrypt_raw(x)
            ^ self.branches[2].encrypt_raw(x)
    }

    pub fn encrypt(&self, plaintext: State128) -> State128 {
        State128::from_u128(self.encrypt_raw(plaintext.to_u128()))
    }
}

/// A keyed [`Target`].
#[derive(Clone)]
pub enum TargetCipher {
    Branch(BranchCipher),
    Prf(Prf),
}

impl TargetCipher {
    pub fn new(target: Target, master: &MasterKey, rounds: usize) -> Result<Self, CipherError> {
        Ok(match target {
            Target::Branch(b) => TargetCipher::Branch(BranchCipher::new(b, master, rounds)?),
            Target::Prf => TargetCipher::Prf(Prf::new(master, rounds)?),
        })
    }

    pub fn target(&self) -> Target {
        match self {
            TargetCipher::Branch(c) => Target::Branch(c.branch()),
            TargetCipher::Prf(_) => Target::Prf,
        }
    }

    pub fn rounds(&self) -> usize {
        match self {
            TargetCipher::Branch(c) => c.rounds(),
            TargetCipher::Prf(p) => p.rounds(),
        }
    }

    #[inline]
    pub fn encrypt_raw(&self, x: u128) -> u128 {
        match self {
            TargetCipher::Branch(c) => c.encrypt_raw(x),
            TargetCipher::Prf(p) => p.encrypt_raw(x),
        }
    }

    /// Evaluates `span` on every branch of the target and XORs the results.
    #[inline]
    pub fn eval_span_raw(&self, x: u128, span: RoundSpan) -> u128 {
        match self {
            TargetCipher::Branch(c) => c.eval_span_raw(x, span),
            TargetCipher::Prf(p) => p
                .branches
                .iter()
                .fold(0, |acc, c| acc ^ c.eval_span_raw(x, span)),
        }
    }

    pub fn eval_span(&self, input: State128, span: RoundSpan) -> Result<State128, CipherError> {
        if span.end() > 2 * self.rounds() {
            return Err(CipherError::Span {
                start: span.start(),
                end: span.end(),
                rounds: self.rounds(),
            });
        }
        Ok(State128::from_u128(
            self.eval_span_raw(input.to_u128(), span),
        ))
    }
}

pub fn encrypt_prf(
    master: &MasterKey,
    plaintext: State128,
    rounds: usize,
) -> Result<State128, CipherError> {
    Ok(Prf::new(master, rounds)?.encrypt(plaintext))
}
