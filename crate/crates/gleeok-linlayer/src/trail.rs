use std::fmt;

use gleeok_cipher::{ByteSlicedMap, LinearParams, State128};
use gleeok_sbox::{build_table, SboxName, TableKind};

use crate::error::LinLayerError;
use crate::mask::{pullback_matrix, MaskRule};

pub const MAX_TRAIL_ROUNDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailCaps {
    /// Largest total squared-correlation exponent searched.
    pub max_weight: u32,
    pub max_active_per_round: usize,
}

impl Default for TrailCaps {
    fn default() -> Self {
        TrailCaps {
            max_weight: 20,
            max_active_per_round: 4,
        }
    }
}

/// A linear trail over whole rounds (Sbox layer then θ, π).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearTrail {
    pub params: LinearParams,
    pub rule: MaskRule,
    pub sbox_inputs: Vec<State128>,
    pub sbox_outputs: Vec<State128>,
    /// Squared-correlation exponent of each round.
    pub weights: Vec<u32>,
    /// Mask after the last linear half.
    pub output_mask: State128,
    /// False when the caps cut off part of the search below this weight.
    pub proven_optimal: bool,
}

impl LinearTrail {
    pub fn rounds(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn input_mask(&self) -> State128 {
        self.sbox_inputs[0]
    }
}

impl fmt::Display for LinearTrail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} rounds, params {}, squared correlation 2^-{}{}",
            self.rounds(),
            self.params,
            self.total_weight(),
            if self.proven_optimal {
                " (optimal)"
            } else {
                " (within caps, not proven optimal)"
            }
        )?;
        for (r, ((a, b), w)) in self
            .sbox_inputs
            .iter()
            .zip(&self.sbox_outputs)
            .zip(&self.weights)
            .enumerate()
        {
            writeln!(
                f,
                "  round {}: in {}  out {}  w {w}",
                r + 1,
                a.to_hex(),
                b.to_hex()
            )?;
        }
        write!(f, "  output  {}", self.output_mask.to_hex())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrailSearch {
    Found(LinearTrail),
    /// Nothing within `max_weight`; `truncated` says whether the per-round
    /// activity cap also cut branches.
    CapExceeded {
        max_weight: u32,
        truncated: bool,
    },
}

impl TrailSearch {
    pub fn trail(&self) -> Option<&LinearTrail> {
        match self {
            TrailSearch::Found(t) => Some(t),
            TrailSearch::CapExceeded { .. } => None,
        }
    }
}

/// S4 LAT entries as squared-correlation exponents.
struct LatWeights {
    /// Input masks compatible with each output mask, lightest first.
    by_output: Vec<Vec<(u8, u32)>>,
    /// Lightest output mask for each input mask.
    best_output: Vec<(u8, u32)>,
}

impl LatWeights {
    fn new() -> Self {
        let lat = build_table(&SboxName::S4.spec(), TableKind::Lat);
        let w = |a: usize, b: usize| lat.weight(a, b).map(|w| 2 * w);
        let by_output = (0..16)
            .map(|b| {
                let mut v: Vec<(u8, u32)> = (1..16)
                    .filter_map(|a| w(a, b).map(|w| (a as u8, w)))
                    .collect();
                v.sort_by_key(|&(a, w)| (w, a));
                v
            })
            .collect();
        let best_output = (0..16)
            .map(|a| {
                (1..16)
                    .filter_map(|b| w(a, b).map(|w| (b as u8, w)))
                    .min_by_key(|&(b, w)| (w, b))
                    .unwrap_or((0, 0))
            })
            .collect();
        LatWeights {
            by_output,
            best_output,
        }
    }

    fn min_input_weight(&self, output: u8) -> u32 {
        self.by_output[output as usize][0].1
    }
}

fn active_nibbles(x: State128) -> Vec<(usize, u8)> {
    (0..32)
        .filter(|&i| x.nibble(i) != 0)
        .map(|i| (i, x.nibble(i)))
        .collect()
}

struct Searcher {
    lat: LatWeights,
    pull: ByteSlicedMap,
    caps: TrailCaps,
    rounds: usize,
    /// Lower bounds on the best weight for `j` rounds.
    lower: Vec<u32>,
    /// Restrict the last-round mask to have nibble 0 active.
    canonical: bool,
    truncated: bool,
    inputs: Vec<State128>,
    outputs: Vec<State128>,
    weights: Vec<u32>,
}

impl Searcher {
    fn pull(&self, x: State128) -> State128 {
        self.pull.apply(x)
    }

    /// Chooses the last round's Sbox inputs nibble by nibble.
    fn last_round(
        &mut self,
        budget: u32,
        from: usize,
        mask: State128,
        out: State128,
        acc: u32,
        count: usize,
    ) -> bool {
        let r = self.rounds - 1;
        if count > 0 {
            self.inputs[r] = mask;
            self.outputs[r] = out;
            self.weights[r] = acc;
            if r == 0 {
                return true;
            }
            if self.earlier_round(budget, r - 1, self.pull(out), acc) {
                return true;
            }
        }
        if acc + 2 + self.lower[r] > budget {
            return false;
        }
        if count == self.caps.max_active_per_round {
            self.truncated = true;
            return false;
        }
        let last = if self.canonical && count == 0 { 1 } else { 32 };
        for nibble in from..last {
            for v in 1..16u8 {
                let (b, w) = self.lat.best_output[v as usize];
                if acc + w + self.lower[r] > budget {
                    continue;
                }
                let (mut m, mut o) = (mask, out);
                m.set_nibble(nibble, v);
                o.set_nibble(nibble, b);
                if self.last_round(budget, nibble + 1, m, o, acc + w, count + 1) {
                    return true;
                }
            }
        }
        false
    }

    /// Round `j` with its Sbox outputs fixed to `out`; `spent` is the weight
    /// of rounds after `j`.
    fn earlier_round(&mut self, budget: u32, j: usize, out: State128, spent: u32) -> bool {
        let active = active_nibbles(out);
        let floor: u32 = active
            .iter()
            .map(|&(_, b)| self.lat.min_input_weight(b))
            .sum();
        if spent + floor + self.lower[j] > budget {
            return false;
        }
        if active.len() > self.caps.max_active_per_round {
            self.truncated = true;
            return false;
        }
        self.outputs[j] = out;
        if j == 0 {
            let mut input = State128::ZERO;
            for &(i, b) in &active {
                input.set_nibble(i, self.lat.by_output[b as usize][0].0);
            }
            self.inputs[0] = input;
            self.weights[0] = floor;
            return true;
        }
        self.choose_inputs(budget, j, &active, 0, State128::ZERO, 0, floor, spent)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_inputs(
        &mut self,
        budget: u32,
        j: usize,
        active: &[(usize, u8)],
        k: usize,
        input: State128,
        partial: u32,
        remaining_floor: u32,
        spent: u32,
    ) -> bool {
        if k == active.len() {
            self.inputs[j] = input;
            self.weights[j] = partial;
            return self.earlier_round(budget, j - 1, self.pull(input), spent + partial);
        }
        let (nibble, b) = active[k];
        let floor_here = self.lat.min_input_weight(b);
        let options = self.lat.by_output[b as usize].clone();
        for (a, w) in options {
            if spent + partial + w + (remaining_floor - floor_here) + self.lower[j] > budget {
                break;
            }
            let mut next = input;
            next.set_nibble(nibble, a);
            if self.choose_inputs(
                budget,
                j,
                active,
                k + 1,
                next,
                partial + w,
                remaining_floor - floor_here,
                spent,
            ) {
                return true;
            }
        }
        false
    }
}

fn search(
    params: LinearParams,
    rounds: usize,
    caps: TrailCaps,
    rule: MaskRule,
    canonical: bool,
) -> Result<TrailSearch, LinLayerError> {
    if !(1..=MAX_TRAIL_ROUNDS).contains(&rounds) {
        return Err(LinLayerError::TrailRounds {
            got: rounds,
            max: MAX_TRAIL_ROUNDS,
        });
    }
    let matrix = pullback_matrix(params, rule)?;
    let inverse = matrix
        .inverse()
        .ok_or(LinLayerError::Singular(params.theta.offsets()))?;
    let mut s = Searcher {
        lat: LatWeights::new(),
        pull: ByteSlicedMap::new(|x| matrix.apply(x)),
        caps,
        rounds: 0,
        lower: vec![0],
        canonical,
        truncated: false,
        inputs: Vec::new(),
        outputs: Vec::new(),
        weights: Vec::new(),
    };
    let mut proven = true;
    let mut result = None;
    for r in 1..=rounds {
        s.rounds = r;
        s.inputs = vec![State128::ZERO; r];
        s.outputs = vec![State128::ZERO; r];
        s.weights = vec![0; r];
        s.truncated = false;
        let start = s.lower[r - 1] + 2;
        let mut found = None;
        for budget in (start..=caps.max_weight).step_by(2) {
            if s.last_round(budget, 0, State128::ZERO, State128::ZERO, 0, 0) {
                found = Some(budget);
                break;
            }
        }
        let Some(weight) = found else {
            return Ok(TrailSearch::CapExceeded {
                max_weight: caps.max_weight,
                truncated: s.truncated,
            });
        };
        proven &= !s.truncated;
        // A bound found under truncation may overestimate, so it is not
        // used to prune longer searches.
        s.lower
            .push(if proven { weight } else { s.lower[r - 1] + 2 });
        if r == rounds {
            result = Some(LinearTrail {
                params,
                rule,
                sbox_inputs: s.inputs.clone(),
                sbox_outputs: s.outputs.clone(),
                weights: s.weights.clone(),
                output_mask: inverse.apply(s.outputs[r - 1]),
                proven_optimal: proven,
            });
        }
    }
    Ok(TrailSearch::Found(
        result.expect("loop reaches the requested round count"),
    ))
}

/// Best linear trail of `rounds` rounds found by branch and bound within
/// `caps`, pulling masks back with `Mᵀ`.
pub fn best_linear_trail(
    params: LinearParams,
    rounds: usize,
    caps: TrailCaps,
) -> Result<TrailSearch, LinLayerError> {
    search(params, rounds, caps, MaskRule::Transposed, true)
}

/// As [`best_linear_trail`] with an explicit mask rule.
pub fn best_linear_trail_with(
    params: LinearParams,
    rounds: usize,
    caps: TrailCaps,
    rule: MaskRule,
) -> Result<TrailSearch, LinLayerError> {
    search(params, rounds, caps, rule, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gleeok_cipher::BranchId;

    #[test]
    fn rotation_shortcut_loses_nothing() {
        let caps = TrailCaps {
            max_weight: 10,
            max_active_per_round: 2,
        };
        for rounds in 1..=2 {
            let fixed = search(
                BranchId::Branch3.linear(),
                rounds,
                caps,
                MaskRule::Transposed,
                true,
            )
            .unwrap();
            let free = search(
                BranchId::Branch3.linear(),
                rounds,
                caps,
                MaskRule::Transposed,
                false,
            )
            .unwrap();
            assert_eq!(
                fixed.trail().map(LinearTrail::total_weight),
                free.trail().map(LinearTrail::total_weight)
            );
        }
    }

    #[test]
    fn lightest_lat_entries() {
        let lat = LatWeights::new();
        assert!(lat.best_output[1..].iter().all(|&(_, w)| w == 2));
        assert!(lat.by_output[1..].iter().all(|v| v[0].1 == 2));
    }
}
