use std::fmt;

use gleeok_cipher::{
    apply_linear, BranchCipher, BranchId, MasterKey, State128, Target, TargetCipher,
};
use gleeok_degree::degree_profile;
use gleeok_sbox::SboxName;
use gleeok_stats::{balance_map, BalanceMap, KeyedRandomFunction, PlaintextStructure};
use rayon::prelude::*;

use crate::error::AttackError;
use crate::gadget::{gadget_set, GadgetSet};

/// Chosen-plaintext access to a round-reduced cipher.
pub trait Oracle: Sync {
    fn rounds(&self) -> usize;
    fn query(&self, plaintext: u128) -> u128;
}

/// The PRF (or a single branch) under a hidden key.
pub struct CipherOracle {
    cipher: TargetCipher,
}

impl CipherOracle {
    pub fn new(target: Target, key: &MasterKey, rounds: usize) -> Result<Self, AttackError> {
        Ok(CipherOracle {
            cipher: TargetCipher::new(target, key, rounds)?,
        })
    }
}

impl Oracle for CipherOracle {
    fn rounds(&self) -> usize {
        self.cipher.rounds()
    }

    fn query(&self, plaintext: u128) -> u128 {
        self.cipher.encrypt_raw(plaintext)
    }
}

/// A keyed pseudorandom map claiming `rounds` rounds.
pub struct RandomOracle {
    f: KeyedRandomFunction,
    rounds: usize,
}

impl RandomOracle {
    pub fn new(seed: u64, rounds: usize) -> Self {
        RandomOracle {
            f: KeyedRandomFunction::new(seed),
            rounds,
        }
    }
}

impl Oracle for RandomOracle {
    fn rounds(&self) -> usize {
        self.rounds
    }

    fn query(&self, plaintext: u128) -> u128 {
        self.f.apply(plaintext)
    }
}

/// Wraps an oracle and flips ciphertext bit `x0` for one plaintext.
pub struct FaultyOracle<O> {
    pub inner: O,
    pub faulty_plaintext: u128,
}

impl<O: Oracle> Oracle for FaultyOracle<O> {
    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    fn query(&self, plaintext: u128) -> u128 {
        let c = self.inner.query(plaintext);
        if plaintext == self.faulty_plaintext {
            c ^ (1 << 127)
        } else {
            c
        }
    }
}

/// Shape of a one-round-prepended integral attack.
///
/// The first-round Sbox `target_sbox` (1-based) of Branch3 carries the
/// gadget, `constant_nibbles` are fixed, `active_nibbles` run through all
/// values. The distinguisher covers the Branch3 L-half of round 1 plus
/// `total_rounds - 1` rounds; when the target includes Branch1/Branch2 they
/// see the plaintext set directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackConfig {
    pub target: Target,
    pub total_rounds: usize,
    pub target_sbox: usize,
    pub gadgets: Vec<usize>,
    pub constant_nibbles: Vec<(usize, u8)>,
    pub active_nibbles: Vec<usize>,
    /// Value of every bit not otherwise assigned.
    pub base: State128,
}

/// Data needed by one structure and by the union over all guesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DataShape {
    pub per_guess_log2: usize,
    pub union_log2: usize,
}

/// Why the correct guess is balanced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceArgument {
    /// The affine set at the Branch3 Sbox output has more dimensions than
    /// the degree bound of the remaining rounds.
    DegreeBound,
    /// One round remains and every second-round Sbox reads at most
    /// `fan_in` gadget bits, so the output is of degree `fan_in < 3` in the
    /// three free gadget bits.
    SingleRoundFanIn { fan_in: usize },
}

impl AttackConfig {
    /// The desk-scale instance: Branch3 with 2 rounds, the gadget alone on
    /// Sbox 2 (8 plaintexts per guess), Sbox 1 constant, gadget sets 0 and 1.
    pub fn scaled() -> Self {
        AttackConfig {
            target: Target::Branch(BranchId::Branch3),
            total_rounds: 2,
            target_sbox: 2,
            gadgets: vec![0, 1],
            constant_nibbles: vec![(0, 0x9)],
            active_nibbles: Vec::new(),
            base: State128::from_u128(0x5a5a_5a5a_5a5a_5a5a_5a5a_5a5a_5a5a_5a5a),
        }
    }

    /// The PRF at 3 rounds with Sboxes 3 to 5 fully active (`2^15`
    /// plaintexts per guess). Balanced for every guess, so it cannot
    /// separate keys.
    pub fn prf_three_round() -> Self {
        AttackConfig {
            target: Target::Prf,
            total_rounds: 3,
            active_nibbles: vec![2, 3, 4],
            ..AttackConfig::scaled()
        }
    }

    /// The full-size 7-round shape on the PRF: Sbox 1 constant, gadget on
    /// `target_sbox`, every other Sbox active.
    pub fn seven_round(target_sbox: usize) -> Self {
        let gadget_nibble = target_sbox - 1;
        AttackConfig {
            target: Target::Prf,
            total_rounds: 7,
            target_sbox,
            gadgets: vec![0, 1],
            constant_nibbles: vec![(0, 0)],
            active_nibbles: (1..32).filter(|&n| n != gadget_nibble).collect(),
            base: State128::ZERO,
        }
    }

    pub fn active_bits(&self) -> usize {
        4 * self.active_nibbles.len()
    }

    pub fn data_shape(&self) -> DataShape {
        DataShape {
            per_guess_log2: self.active_bits() + 3,
            union_log2: self.active_bits() + 4,
        }
    }

    fn check_shape(&self) -> Result<(), AttackError> {
        if self.total_rounds < 2 {
            return Err(AttackError::TooFewRounds(self.total_rounds));
        }
        if !(1..=32).contains(&self.target_sbox) {
            return Err(AttackError::TargetSbox(self.target_sbox));
        }
        if let Some(&g) = self.gadgets.iter().find(|&&g| g > 3) {
            return Err(AttackError::GadgetIndex(g));
        }
        Ok(())
    }

    /// Checks that the correct guess is balanced and says why.
    ///
    /// Branch1/Branch2 see the union of 8 cosets of the active space, so
    /// their sum vanishes once `A >= deg` (the top coefficient is constant
    /// and the coset count is even).
    pub fn validate(&self) -> Result<BalanceArgument, AttackError> {
        self.check_shape()?;
        let active = self.active_bits();
        let outer = self
            .target
            .branches()
            .iter()
            .filter(|&&b| b != BranchId::Branch3)
            .map(|&b| bound(b, self.total_rounds))
            .max();
        if let Some(outer) = outer {
            if active < outer {
                return Err(AttackError::OuterMargin {
                    active,
                    rounds: self.total_rounds,
                    degree: outer,
                });
            }
        }
        let inner = self.inner_degree();
        if active + 3 > inner {
            return Ok(BalanceArgument::DegreeBound);
        }
        if self.total_rounds == 2 && active == 0 {
            let fan_in = gadget_fan_in(self.target_sbox)?;
            if fan_in < 3 {
                return Ok(BalanceArgument::SingleRoundFanIn { fan_in });
            }
        }
        Err(AttackError::InnerMargin {
            dimension: active + 3,
            rounds: self.total_rounds - 1,
            degree: inner,
        })
    }

    fn inner_degree(&self) -> usize {
        bound(BranchId::Branch3, self.total_rounds - 1)
    }

    /// Wrong guesses can only be rejected when the active bits alone do not
    /// already balance Branch3.
    pub fn filters_wrong_keys(&self) -> bool {
        match self.validate() {
            Ok(BalanceArgument::SingleRoundFanIn { .. }) => true,
            _ => self.active_bits() < self.inner_degree(),
        }
    }
}

fn bound(branch: BranchId, rounds: usize) -> usize {
    degree_profile(Target::Branch(branch), rounds)
        .ok()
        .and_then(|p| p.bound(rounds))
        .unwrap_or(127)
}

/// Largest number of output bits of Branch3 Sbox `sbox` (1-based) that one
/// second-round Sbox reads through the linear layer.
pub fn gadget_fan_in(sbox: usize) -> Result<usize, AttackError> {
    if !(1..=32).contains(&sbox) {
        return Err(AttackError::TargetSbox(sbox));
    }
    let mut per_sbox = [0usize; 32];
    for j in 0..4 {
        let image = apply_linear(
            BranchId::Branch3.linear(),
            State128::unit(4 * (sbox - 1) + j),
        );
        let mut reached = [false; 32];
        for bit in image.ones() {
            reached[bit / 4] = true;
        }
        for (count, hit) in per_sbox.iter_mut().zip(reached) {
            *count += usize::from(hit);
        }
    }
    Ok(per_sbox.into_iter().max().unwrap_or(0))
}

/// Plaintexts for one gadget and one guess of the whitening nibble: the
/// target nibble runs over `gadget ^ guess`.
pub fn build_structure(
    config: &AttackConfig,
    gadget: &GadgetSet,
    guess: u8,
) -> Result<PlaintextStructure, AttackError> {
    if !(1..=32).contains(&config.target_sbox) {
        return Err(AttackError::TargetSbox(config.target_sbox));
    }
    let mut s = PlaintextStructure::new(config.base);
    for &(n, v) in &config.constant_nibbles {
        s = s.with_constant_nibble(n, v)?;
    }
    s = s.with_gadget(config.target_sbox - 1, gadget.shifted(guess & 0xf))?;
    for &n in &config.active_nibbles {
        s = s.with_active_nibble(n)?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessOutcome {
    pub gadget: usize,
    pub guess: u8,
    pub balance: BalanceMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryTranscript {
    pub config: AttackConfig,
    pub outcomes: Vec<GuessOutcome>,
    /// Passing guesses per gadget index.
    pub candidates: Vec<(usize, Vec<u8>)>,
    pub intersection: Vec<u8>,
    pub queries: u128,
}

impl RecoveryTranscript {
    /// The recovered nibble, or `None` when the intersection is not a
    /// single value.
    pub fn recovered(&self) -> Option<u8> {
        match self.intersection.as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

impl fmt::Display for RecoveryTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# key recovery: {} rounds, target sbox {}, {} queries",
            self.config.total_rounds, self.config.target_sbox, self.queries
        )?;
        for o in &self.outcomes {
            writeln!(f, "gadget {} guess {:x} {}", o.gadget, o.guess, o.balance)?;
        }
        for (g, c) in &self.candidates {
            writeln!(f, "candidates S{g} {}", hex_list(c))?;
        }
        match self.recovered() {
            Some(n) => write!(f, "recovered {n:x}"),
            None => write!(f, "ambiguous {}", hex_list(&self.intersection)),
        }
    }
}

pub fn hex_list(values: &[u8]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:#x}")).collect();
    format!("{{{}}}", items.join(", "))
}

/// Runs every (gadget, guess) structure through the oracle and intersects
/// the balanced guesses.
pub fn run_key_recovery(
    config: &AttackConfig,
    oracle: &impl Oracle,
) -> Result<RecoveryTranscript, AttackError> {
    config.validate()?;
    if oracle.rounds() != config.total_rounds {
        return Err(AttackError::OracleRounds {
            oracle: oracle.rounds(),
            config: config.total_rounds,
        });
    }
    let s4 = SboxName::S4.spec();
    let gadgets: Vec<GadgetSet> = config
        .gadgets
        .iter()
        .map(|&g| gadget_set(&s4, g))
        .collect::<Result<_, _>>()?;
    let grid: Vec<(usize, u8)> = (0..gadgets.len())
        .flat_map(|g| (0..16u8).map(move |k| (g, k)))
        .collect();
    let outcomes: Vec<GuessOutcome> = grid
        .par_iter()
        .map(|&(g, guess)| {
            let s = build_structure(config, &gadgets[g], guess)?;
            Ok(GuessOutcome {
                gadget: gadgets[g].index,
                guess,
                balance: balance_map(&s, |p| oracle.query(p))?,
            })
        })
        .collect::<Result<_, AttackError>>()?;
    let candidates: Vec<(usize, Vec<u8>)> = gadgets
        .iter()
        .map(|g| {
            let pass = outcomes
                .iter()
                .filter(|o| o.gadget == g.index && o.balance.is_balanced())
                .map(|o| o.guess)
                .collect();
            (g.index, pass)
        })
        .collect();
    let intersection = (0..16u8)
        .filter(|k| candidates.iter().all(|(_, c)| c.contains(k)))
        .collect();
    let queries = grid.len() as u128 * (8u128 << config.active_bits());
    Ok(RecoveryTranscript {
        config: config.clone(),
        outcomes,
        candidates,
        intersection,
        queries,
    })
}

/// Branch3 whitening nibble at `sbox` (1-based) for `key`.
pub fn whitening_nibble(key: &MasterKey, sbox: usize) -> Result<u8, AttackError> {
    if !(1..=32).contains(&sbox) {
        return Err(AttackError::TargetSbox(sbox));
    }
    Ok(BranchCipher::new(BranchId::Branch3, key, 1)?
        .whitening_key()
        .nibble(sbox - 1))
}

/// Master-key bit indices feeding the four whitening bits of `sbox`.
pub fn whitening_master_bits(sbox: usize) -> Result<[usize; 4], AttackError> {
    if !(1..=32).contains(&sbox) {
        return Err(AttackError::TargetSbox(sbox));
    }
    let first = 4 * (sbox - 1);
    Ok([0, 1, 2, 3].map(|j| gleeok_cipher::whitening_source_bit(BranchId::Branch3, first + j)))
}
