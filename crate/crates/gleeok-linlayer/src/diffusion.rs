use std::fmt;

use gleeok_cipher::{
    apply_linear, apply_pi, BranchId, ByteSlicedMap, Gf2Matrix128, LinearParams, State128,
};

use crate::error::LinLayerError;

pub const MAX_HALF_ROUNDS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HalfLayer {
    /// 4-bit Sboxes on every nibble: each output bit depends on its whole nibble.
    Sbox,
    /// θ then π.
    Linear,
}

impl HalfLayer {
    fn other(self) -> Self {
        match self {
            HalfLayer::Sbox => HalfLayer::Linear,
            HalfLayer::Linear => HalfLayer::Sbox,
        }
    }

    fn letter(self) -> char {
        match self {
            HalfLayer::Sbox => 'S',
            HalfLayer::Linear => 'L',
        }
    }
}

/// Alternating half-layers starting with `start`.
pub fn half_layers(start: HalfLayer, count: usize) -> impl Iterator<Item = HalfLayer> {
    std::iter::successors(Some(start), |l| Some(l.other())).take(count)
}

/// Per output bit, the input bits it depends on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfluenceMap {
    deps: Vec<State128>,
}

impl InfluenceMap {
    pub fn identity() -> Self {
        InfluenceMap {
            deps: (0..128).map(State128::unit).collect(),
        }
    }

    pub fn dependencies(&self, output_bit: usize) -> State128 {
        self.deps[output_bit]
    }

    /// Composes one more half-layer on the output side.
    pub fn then(&self, layer: HalfLayer, linear: &Gf2Matrix128) -> Self {
        let deps = (0..128)
            .map(|i| {
                let reads = match layer {
                    HalfLayer::Sbox => State128::from_u128(0xf << (124 - 4 * (i / 4))),
                    HalfLayer::Linear => linear.row(i),
                };
                reads
                    .ones()
                    .fold(State128::ZERO, |acc, j| acc | self.deps[j])
            })
            .collect();
        InfluenceMap { deps }
    }

    pub fn is_full(&self) -> bool {
        self.deps.iter().all(|d| *d == State128::ONES)
    }

    /// Smallest number of output bits any single input bit reaches.
    pub fn min_influence(&self) -> u32 {
        self.influence_counts().into_iter().min().unwrap_or(0)
    }

    /// Smallest number of input bits any output bit depends on.
    pub fn min_dependency(&self) -> u32 {
        self.deps.iter().map(|d| d.count_ones()).min().unwrap_or(0)
    }

    /// Number of output bits each input bit reaches.
    pub fn influence_counts(&self) -> Vec<u32> {
        (0..128)
            .map(|j| self.deps.iter().filter(|d| d.bit(j)).count() as u32)
            .collect()
    }

    /// Whether no input bit reaches more outputs, and no output bit reads
    /// more inputs, than in `other`. Positions move under π, so the sets
    /// themselves need not nest.
    pub fn is_within(&self, other: &InfluenceMap) -> bool {
        let reach = self
            .influence_counts()
            .into_iter()
            .zip(other.influence_counts())
            .all(|(a, b)| a <= b);
        reach
            && self
                .deps
                .iter()
                .zip(&other.deps)
                .all(|(a, b)| a.count_ones() <= b.count_ones())
    }
}

/// Dependencies after `half_rounds` alternating half-layers from `start`.
pub fn influence_after(
    params: LinearParams,
    start: HalfLayer,
    half_rounds: usize,
) -> Result<InfluenceMap, LinLayerError> {
    if half_rounds > MAX_HALF_ROUNDS {
        return Err(LinLayerError::HalfRounds {
            got: half_rounds,
            max: MAX_HALF_ROUNDS,
        });
    }
    let linear = Gf2Matrix128::from_map(|x| apply_linear(params, x));
    Ok(half_layers(start, half_rounds).fold(InfluenceMap::identity(), |m, l| m.then(l, &linear)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiffusionSummary {
    /// Half-rounds until every output bit depends on every input bit.
    pub full_after: Option<usize>,
    /// Minimum per-input-bit influence one half-round before that.
    pub min_influence_before_full: Option<u32>,
}

pub fn diffusion_summary(params: LinearParams, start: HalfLayer) -> DiffusionSummary {
    let linear = Gf2Matrix128::from_map(|x| apply_linear(params, x));
    let mut map = InfluenceMap::identity();
    let mut previous_min = map.min_influence();
    for (h, layer) in half_layers(start, MAX_HALF_ROUNDS).enumerate() {
        map = map.then(layer, &linear);
        if map.is_full() {
            return DiffusionSummary {
                full_after: Some(h + 1),
                min_influence_before_full: Some(previous_min),
            };
        }
        previous_min = map.min_influence();
    }
    DiffusionSummary {
        full_after: None,
        min_influence_before_full: None,
    }
}

/// Which half-round sequence "full diffusion" is measured over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiffusionConvention {
    pub start: HalfLayer,
    /// Full diffusion is required after this many half-layers; the
    /// influence threshold is read one half-layer earlier.
    pub full_within: usize,
}

impl DiffusionConvention {
    pub const S_L_S_L_S: Self = DiffusionConvention {
        start: HalfLayer::Sbox,
        full_within: 5,
    };
    pub const L_S_L_S_L: Self = DiffusionConvention {
        start: HalfLayer::Linear,
        full_within: 5,
    };
    pub const S_L_S_L: Self = DiffusionConvention {
        start: HalfLayer::Sbox,
        full_within: 4,
    };
    pub const L_S_L_S: Self = DiffusionConvention {
        start: HalfLayer::Linear,
        full_within: 4,
    };
    pub const CANDIDATES: [Self; 4] = [
        Self::S_L_S_L_S,
        Self::L_S_L_S_L,
        Self::S_L_S_L,
        Self::L_S_L_S,
    ];
    /// The sequence that reproduces the published candidate counts.
    pub const LOCKED: Self = Self::S_L_S_L;

    pub fn layers(&self) -> impl Iterator<Item = HalfLayer> {
        half_layers(self.start, self.full_within)
    }
}

impl fmt::Display for DiffusionConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.layers().map(|l| l.letter().to_string()).collect();
        f.write_str(&letters.join("-"))
    }
}

const NIBBLE_LOW: u128 = 0x1111_1111_1111_1111_1111_1111_1111_1111;

fn nibble_fill(x: u128) -> u128 {
    ((x | x >> 1 | x >> 2 | x >> 3) & NIBBLE_LOW) * 0xf
}

/// Forward influence of single input bits under a fixed π, for scanning
/// many θ offsets.
///
/// Rotating the input by `4k` rotates every intermediate set (by a multiple
/// of 4 that π rescales), so the bits of nibble 0 represent all inputs.
pub struct DiffusionKernel {
    pi: ByteSlicedMap,
}

/// Outcome of the two diffusion filters for one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterVerdict {
    pub full_diffusion: bool,
    pub min_influence: u32,
    pub pass: bool,
}

impl DiffusionKernel {
    pub fn new(pi: gleeok_cipher::PiParam) -> Self {
        DiffusionKernel {
            pi: ByteSlicedMap::new(|x| apply_pi(pi, x)),
        }
    }

    #[inline]
    fn step(&self, x: u128, layer: HalfLayer, offsets: [usize; 3]) -> u128 {
        match layer {
            HalfLayer::Sbox => nibble_fill(x),
            HalfLayer::Linear => {
                let [t0, t1, t2] = offsets.map(|t| t as u32);
                self.pi
                    .apply_raw(x.rotate_left(t0) | x.rotate_left(t1) | x.rotate_left(t2))
            }
        }
    }

    /// `(full after the sequence, minimum influence one half-layer earlier)`.
    pub fn measure(&self, offsets: [usize; 3], convention: DiffusionConvention) -> (bool, u32) {
        let mut full = true;
        let mut min_before = 128;
        for j in 0..4 {
            let mut x = 1u128 << (127 - j);
            for (h, layer) in convention.layers().enumerate() {
                if h + 1 == convention.full_within {
                    min_before = min_before.min(x.count_ones());
                }
                x = self.step(x, layer, offsets);
            }
            full &= x == u128::MAX;
        }
        (full, min_before)
    }
}

/// Influence threshold for the second filter: the original Branch3 value.
pub fn original_threshold(convention: DiffusionConvention) -> u32 {
    let original = BranchId::Branch3.linear();
    DiffusionKernel::new(original.pi)
        .measure(original.theta.offsets(), convention)
        .1
}

pub fn passes_diffusion_filters(
    params: LinearParams,
    convention: DiffusionConvention,
) -> FilterVerdict {
    let (full_diffusion, min_influence) =
        DiffusionKernel::new(params.pi).measure(params.theta.offsets(), convention);
    let pass = full_diffusion && min_influence >= original_threshold(convention);
    FilterVerdict {
        full_diffusion,
        min_influence,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_half_rounds_is_identity() {
        let m = influence_after(BranchId::Branch3.linear(), HalfLayer::Sbox, 0).unwrap();
        assert_eq!(m, InfluenceMap::identity());
    }

    #[test]
    fn one_sbox_half_reads_the_nibble() {
        let m = influence_after(BranchId::Branch3.linear(), HalfLayer::Sbox, 1).unwrap();
        for i in 0..128 {
            assert_eq!(m.dependencies(i).count_ones(), 4);
            assert!(m.dependencies(i).bit(i));
        }
    }

    #[test]
    fn too_many_half_rounds() {
        assert!(influence_after(BranchId::Branch3.linear(), HalfLayer::Sbox, 9).is_err());
    }

    #[test]
    fn convention_names() {
        assert_eq!(DiffusionConvention::S_L_S_L_S.to_string(), "S-L-S-L-S");
        assert_eq!(DiffusionConvention::L_S_L_S.to_string(), "L-S-L-S");
    }
}
