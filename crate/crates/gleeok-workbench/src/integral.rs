use gleeok_attack::gadget_set;
use gleeok_cipher::{BranchId, MasterKey, RoundSpan, State128, Target, S4};
use gleeok_sbox::SboxName;
use gleeok_stats::{
    balance_map, check_integral_balance, BalanceMap, KeyedRandomFunction, PlaintextStructure,
    StatsError,
};

/// The two desk-scale integral structures with `2^15` plaintexts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralCase {
    /// Branch3 from the Sbox output of round 1: gadget images on nibble 5,
    /// nibbles 6 to 8 active, then θ/π and two more rounds.
    Branch3Scaled,
    /// The PRF over three rounds: nibble 0 constant, gadget on nibble 1,
    /// nibbles 2 to 4 active.
    Prf3,
}

impl IntegralCase {
    pub const ALL: [IntegralCase; 2] = [IntegralCase::Branch3Scaled, IntegralCase::Prf3];

    pub fn name(self) -> &'static str {
        match self {
            IntegralCase::Branch3Scaled => "branch3-scaled",
            IntegralCase::Prf3 => "prf3",
        }
    }

    pub fn target(self) -> Target {
        match self {
            IntegralCase::Branch3Scaled => Target::Branch(BranchId::Branch3),
            IntegralCase::Prf3 => Target::Prf,
        }
    }

    pub fn span(self) -> RoundSpan {
        match self {
            IntegralCase::Branch3Scaled => RoundSpan::half_then_rounds(2),
            IntegralCase::Prf3 => RoundSpan::full(3),
        }
    }

    pub fn structure(self) -> Result<PlaintextStructure, StatsError> {
        let gadget = |index| {
            gadget_set(&SboxName::S4.spec(), index)
                .expect("S4 is a bijective 4-bit Sbox")
                .inputs
        };
        match self {
            IntegralCase::Branch3Scaled => PlaintextStructure::new(State128::from_u128(
                0x0123_4567_89ab_cdef_fedc_ba98_7654_3210,
            ))
            .with_gadget(5, gadget(0))?
            .with_active_nibble(6)?
            .with_active_nibble(7)?
            .with_active_nibble(8)?
            .map_gadget(|v| S4[v as usize]),
            IntegralCase::Prf3 => PlaintextStructure::new(State128::ZERO)
                .with_constant_nibble(0, 0x7)?
                .with_gadget(1, gadget(1))?
                .with_active_nibble(2)?
                .with_active_nibble(3)?
                .with_active_nibble(4),
        }
    }

    pub fn balance(self, key: &MasterKey) -> Result<BalanceMap, StatsError> {
        check_integral_balance(self.target(), &self.structure()?, self.span(), key)
    }
}

/// Balance of a keyed random function over 15 active bits.
pub fn random_control(seed: u64) -> Result<BalanceMap, StatsError> {
    let structure = PlaintextStructure::new(State128::ZERO).with_active_bits(0..15)?;
    let f = KeyedRandomFunction::new(seed);
    balance_map(&structure, |x| f.apply(x))
}
