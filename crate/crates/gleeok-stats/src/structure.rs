use std::fmt;

use gleeok_cipher::{MasterKey, RoundSpan, State128, Target, TargetCipher};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::StatsError;

/// Largest structure [`check_integral_balance`] will enumerate.
pub const ENUMERATION_LIMIT_LOG2: u32 = 24;

/// Eight values taken by one nibble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetNibble {
    pub nibble: usize,
    pub values: [u8; 8],
}

/// A chosen-plaintext set: every bit not listed keeps its value in `base`;
/// constant nibbles are overwritten; the gadget nibble runs over its eight
/// values and every active bit over both values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaintextStructure {
    base: State128,
    constants: Vec<(usize, u8)>,
    gadget: Option<GadgetNibble>,
    active: Vec<usize>,
    used: u128,
}

impl PlaintextStructure {
    pub fn new(base: State128) -> Self {
        PlaintextStructure {
            base,
            constants: Vec::new(),
            gadget: None,
            active: Vec::new(),
            used: 0,
        }
    }

    fn claim(&mut self, bits: impl IntoIterator<Item = usize>) -> Result<(), StatsError> {
        for b in bits {
            if b >= 128 {
                return Err(StatsError::OutOfRange(b));
            }
            let m = State128::unit(b).to_u128();
            if self.used & m != 0 {
                return Err(StatsError::Overlap(b));
            }
            self.used |= m;
        }
        Ok(())
    }

    pub fn with_constant_nibble(mut self, nibble: usize, value: u8) -> Result<Self, StatsError> {
        self.claim((0..4).map(|j| 4 * nibble + j))?;
        self.constants.push((nibble, value & 0xf));
        Ok(self)
    }

    pub fn with_gadget(mut self, nibble: usize, values: [u8; 8]) -> Result<Self, StatsError> {
        let mut seen = 0u16;
        for v in values {
            if v > 0xf || seen & (1 << v) != 0 {
                return Err(StatsError::BadGadget);
            }
            seen |= 1 << v;
        }
        if self.gadget.is_some() {
            return Err(StatsError::Overlap(4 * nibble));
        }
        self.claim((0..4).map(|j| 4 * nibble + j))?;
        self.gadget = Some(GadgetNibble { nibble, values });
        Ok(self)
    }

    pub fn with_active_bits(
        mut self,
        bits: impl IntoIterator<Item = usize>,
    ) -> Result<Self, StatsError> {
        let bits: Vec<usize> = bits.into_iter().collect();
        self.claim(bits.iter().copied())?;
        self.active.extend(bits);
        Ok(self)
    }

    pub fn with_active_nibble(self, nibble: usize) -> Result<Self, StatsError> {
        self.with_active_bits((0..4).map(|j| 4 * nibble + j))
    }

    pub fn base(&self) -> State128 {
        self.base
    }

    pub fn constants(&self) -> &[(usize, u8)] {
        &self.constants
    }

    pub fn gadget(&self) -> Option<GadgetNibble> {
        self.gadget
    }

    pub fn active_bits(&self) -> &[usize] {
        &self.active
    }

    /// `log2` of the number of elements.
    pub fn size_log2(&self) -> f64 {
        self.active.len() as f64 + if self.gadget.is_some() { 3.0 } else { 0.0 }
    }

    pub fn size(&self) -> u128 {
        let g = if self.gadget.is_some() { 8 } else { 1 };
        g << self.active.len()
    }

    /// Same structure with the gadget values replaced by their images.
    pub fn map_gadget(&self, f: impl Fn(u8) -> u8) -> Result<Self, StatsError> {
        let mut out = self.clone();
        if let Some(g) = self.gadget {
            let values = g.values.map(&f);
            out.gadget = None;
            out.used &= !nibble_mask(g.nibble);
            out = out.with_gadget(g.nibble, values)?;
        }
        Ok(out)
    }

    fn anchor(&self) -> u128 {
        let mut s = self.base;
        for &(n, v) in &self.constants {
            s.set_nibble(n, v);
        }
        for &b in &self.active {
            s.set_bit(b, false);
        }
        s.to_u128()
    }

    /// Every element, gadget value outermost.
    pub fn elements(&self) -> impl Iterator<Item = State128> + '_ {
        let anchor = self.anchor();
        let gadget: Vec<u128> = match self.gadget {
            Some(g) => g
                .values
                .iter()
                .map(|&v| {
                    let mut s = State128::from_u128(anchor);
                    s.set_nibble(g.nibble, v);
                    s.to_u128()
                })
                .collect(),
            None => vec![anchor],
        };
        let units: Vec<u128> = self
            .active
            .iter()
            .map(|&b| State128::unit(b).to_u128())
            .collect();
        gadget.into_iter().flat_map(move |start| {
            let units = units.clone();
            (0u64..(1 << units.len())).map(move |code| {
                let mut x = start;
                for (j, u) in units.iter().enumerate() {
                    if (code >> j) & 1 == 1 {
                        x |= u;
                    }
                }
                State128::from_u128(x)
            })
        })
    }
}

fn nibble_mask(nibble: usize) -> u128 {
    0xfu128 << (124 - 4 * nibble)
}

/// XOR of all outputs over a structure; bit `i` set means output bit `x_i`
/// is not balanced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalanceMap(pub State128);

impl BalanceMap {
    pub fn is_balanced(&self) -> bool {
        self.0.is_zero()
    }

    pub fn unbalanced_bits(&self) -> Vec<usize> {
        self.0.ones().collect()
    }
}

impl fmt::Display for BalanceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_balanced() {
            write!(f, "balanced (all 128 bits)")
        } else {
            write!(
                f,
                "{} unbalanced bits, xor sum {}",
                self.0.count_ones(),
                self.0
            )
        }
    }
}

/// XOR-accumulates `f` over the structure.
pub fn balance_map(
    structure: &PlaintextStructure,
    f: impl Fn(u128) -> u128,
) -> Result<BalanceMap, StatsError> {
    if structure.size_log2() > ENUMERATION_LIMIT_LOG2 as f64 {
        return Err(StatsError::StructureTooLarge {
            dimension_log2: structure.size_log2(),
            limit_log2: ENUMERATION_LIMIT_LOG2,
        });
    }
    let sum = structure
        .elements()
        .fold(0u128, |acc, x| acc ^ f(x.to_u128()));
    Ok(BalanceMap(State128::from_u128(sum)))
}

/// Balance of `target` keyed with `key`, evaluated over `span`, across the
/// structure. The PRF target XORs the three branch outputs.
pub fn check_integral_balance(
    target: Target,
    structure: &PlaintextStructure,
    span: RoundSpan,
    key: &MasterKey,
) -> Result<BalanceMap, StatsError> {
    let cipher = TargetCipher::new(target, key, span.rounds_needed())?;
    balance_map(structure, |x| cipher.eval_span_raw(x, span))
}

/// A keyed pseudorandom map on 128-bit values, the control for balance
/// checks.
#[derive(Clone, Debug)]
pub struct KeyedRandomFunction {
    key: [u8; 32],
}

impl KeyedRandomFunction {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        ChaCha8Rng::seed_from_u64(seed).fill(&mut key);
        KeyedRandomFunction { key }
    }

    pub fn apply(&self, x: u128) -> u128 {
        let mut seed = self.key;
        for (s, b) in seed.iter_mut().zip(x.to_le_bytes()) {
            *s ^= b;
        }
        ChaCha8Rng::from_seed(seed).gen()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_is_enforced() {
        let s = PlaintextStructure::new(State128::ZERO)
            .with_active_nibble(2)
            .unwrap();
        assert_eq!(
            s.clone().with_constant_nibble(2, 1),
            Err(StatsError::Overlap(8))
        );
        assert_eq!(
            s.clone().with_active_bits([128]),
            Err(StatsError::OutOfRange(128))
        );
        assert_eq!(
            s.clone().with_gadget(0, [0, 1, 2, 3, 4, 5, 6, 6]),
            Err(StatsError::BadGadget)
        );
        assert!(s.with_gadget(0, [0, 1, 2, 3, 4, 5, 6, 7]).is_ok());
    }

    #[test]
    fn elements_cover_the_structure() {
        let s = PlaintextStructure::new(State128::ONES)
            .with_constant_nibble(0, 0x5)
            .unwrap()
            .with_gadget(1, [1, 0, 2, 4, 3, 0xf, 6, 0xe])
            .unwrap()
            .with_active_bits([100, 127])
            .unwrap();
        let all: std::collections::HashSet<State128> = s.elements().collect();
        assert_eq!(all.len() as u128, s.size());
        assert_eq!(s.size(), 32);
        for x in &all {
            assert_eq!(x.nibble(0), 5);
            assert!([1, 0, 2, 4, 3, 0xf, 6, 0xe].contains(&x.nibble(1)));
            assert_eq!(x.nibble(2), 0xf);
        }
    }

    #[test]
    fn map_gadget_keeps_the_rest() {
        let s = PlaintextStructure::new(State128::ZERO)
            .with_gadget(3, [0, 1, 2, 3, 4, 5, 6, 7])
            .unwrap()
            .with_active_nibble(4)
            .unwrap();
        let m = s.map_gadget(|v| v ^ 8).unwrap();
        assert_eq!(m.gadget().unwrap().values, [8, 9, 10, 11, 12, 13, 14, 15]);
        assert_eq!(m.active_bits(), s.active_bits());
    }

    #[test]
    fn oversized_structures_are_refused() {
        let s = PlaintextStructure::new(State128::ZERO)
            .with_active_bits(0..25)
            .unwrap();
        assert!(matches!(
            balance_map(&s, |x| x),
            Err(StatsError::StructureTooLarge { .. })
        ));
    }
}
