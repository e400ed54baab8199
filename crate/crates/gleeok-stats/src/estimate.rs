use std::fmt;

use gleeok_cipher::{
    BitOrder, MasterKey, ParseHexError, RoundSpan, State128, Target, TargetCipher,
};
use rand::Rng;
use rayon::prelude::*;

use crate::error::StatsError;
use crate::rng::{stream, StreamPurpose, BLOCK};

pub const DEFAULT_BUDGET_LOG2: u32 = 32;

/// An input difference with the output mask it is paired with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DifferenceMaskPair {
    pub difference: State128,
    pub mask: State128,
}

impl DifferenceMaskPair {
    pub const fn new(difference: State128, mask: State128) -> Self {
        DifferenceMaskPair { difference, mask }
    }

    pub fn from_hex_with(
        difference: &str,
        mask: &str,
        order: BitOrder,
    ) -> Result<Self, ParseHexError> {
        Ok(DifferenceMaskPair {
            difference: State128::from_hex_with(difference, order)?,
            mask: State128::from_hex_with(mask, order)?,
        })
    }
}

impl fmt::Display for DifferenceMaskPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.difference, self.mask)
    }
}

/// Sample counts, seed and evaluation budget for one estimation job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingPlan {
    pub samples_per_key: u64,
    pub keys: usize,
    pub seed: u64,
    /// Maximum number of branch evaluations.
    pub budget: u128,
}

impl SamplingPlan {
    pub fn new(samples_per_key: u64, keys: usize, seed: u64) -> Self {
        SamplingPlan {
            samples_per_key,
            keys,
            seed,
            budget: 1 << DEFAULT_BUDGET_LOG2,
        }
    }

    pub fn with_budget(self, budget: u128) -> Self {
        SamplingPlan { budget, ..self }
    }

    fn check(&self, evaluations_per_sample: u128) -> Result<(), StatsError> {
        if self.samples_per_key == 0 {
            return Err(StatsError::NoSamples);
        }
        if self.keys == 0 {
            return Err(StatsError::NoKeys);
        }
        let needed = self.samples_per_key as u128 * self.keys as u128 * evaluations_per_sample;
        if needed > self.budget {
            return Err(StatsError::OverBudget {
                needed,
                needed_log2: (needed as f64).log2(),
                budget_log2: (self.budget as f64).log2(),
            });
        }
        Ok(())
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan::new(1 << 20, 16, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    DifferentialLinear,
    Linear,
    Null,
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateKind::DifferentialLinear => "dl",
            EstimateKind::Linear => "linear",
            EstimateKind::Null => "null",
        })
    }
}

/// Per-key signed sums and the aggregate derived from them.
///
/// DL and null estimates average the signed per-key correlations and then
/// square; linear estimates average the per-key squares, since key bits
/// flip the sign of a linear approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationEstimate {
    pub kind: EstimateKind,
    pub target: Target,
    pub rounds: usize,
    /// The pair used for every key; `None` for null runs, see `null_pairs`.
    pub pair: Option<DifferenceMaskPair>,
    pub null_pairs: Vec<DifferenceMaskPair>,
    pub plan: SamplingPlan,
    /// `sum over samples of (-1)^parity`, one per key.
    pub raw_sums: Vec<i64>,
}

impl CorrelationEstimate {
    pub fn per_key(&self) -> Vec<f64> {
        let n = self.plan.samples_per_key as f64;
        self.raw_sums.iter().map(|&s| s as f64 / n).collect()
    }

    /// Signed mean of the per-key correlations.
    pub fn mean(&self) -> f64 {
        let total: i128 = self.raw_sums.iter().map(|&s| s as i128).sum();
        total as f64 / (self.plan.samples_per_key as f64 * self.raw_sums.len() as f64)
    }

    /// Squared correlation under the kind's aggregation rule.
    pub fn squared(&self) -> f64 {
        match self.kind {
            EstimateKind::Linear => {
                let keys = self.raw_sums.len() as f64;
                self.per_key().iter().map(|c| c * c).sum::<f64>() / keys
            }
            _ => self.mean() * self.mean(),
        }
    }

    pub fn log2_squared(&self) -> f64 {
        self.squared().log2()
    }

    /// Standard error of the signed mean, `1 / sqrt(N * keys)`.
    pub fn std_error(&self) -> f64 {
        1.0 / ((self.plan.samples_per_key as f64) * self.raw_sums.len() as f64).sqrt()
    }

    /// Whether `log2_squared` lies within `tolerance` of `expected_log2`.
    pub fn within(&self, expected_log2: f64, tolerance: f64) -> bool {
        let v = self.log2_squared();
        v.is_finite() && (v - expected_log2).abs() <= tolerance
    }
}

impl fmt::Display for CorrelationEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# estimate {} target={} rounds={}",
            self.kind, self.target, self.rounds
        )?;
        if let Some(pair) = self.pair {
            writeln!(f, "# pair {pair}")?;
        }
        writeln!(
            f,
            "# seed={} samples_per_key={} keys={}",
            self.plan.seed,
            self.plan.samples_per_key,
            self.raw_sums.len()
        )?;
        for (i, (s, c)) in self.raw_sums.iter().zip(self.per_key()).enumerate() {
            match self.null_pairs.get(i) {
                Some(p) => writeln!(f, "key {i} {s} {c:.6e} {p}")?,
                None => writeln!(f, "key {i} {s} {c:.6e}")?,
            }
        }
        writeln!(f, "mean {:.6e}", self.mean())?;
        writeln!(f, "squared {:.6e}", self.squared())?;
        writeln!(f, "log2_squared {:.3}", self.log2_squared())?;
        write!(f, "std_error {:.3e}", self.std_error())
    }
}

/// Random master key number `index` of the run seeded with `seed`.
pub fn derived_key(seed: u64, index: usize) -> MasterKey {
    let mut rng = stream(seed, StreamPurpose::Key, index, 0);
    MasterKey::from_halves(
        State128::from_u128(rng.gen()),
        State128::from_u128(rng.gen()),
    )
}

/// Per-key sums of `(-1)^parity(key, plaintext)` over uniform plaintexts.
fn signed_sums<C: Sync>(
    plan: &SamplingPlan,
    setup: impl Fn(usize) -> Result<C, StatsError>,
    parity: impl Fn(&C, u128) -> bool + Sync,
) -> Result<Vec<i64>, StatsError> {
    let blocks = plan.samples_per_key.div_ceil(BLOCK);
    (0..plan.keys)
        .map(|k| {
            let ctx = setup(k)?;
            Ok((0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut rng = stream(plan.seed, StreamPurpose::Samples, k, b);
                    let count = BLOCK.min(plan.samples_per_key - b * BLOCK);
                    let odd = (0..count).filter(|_| parity(&ctx, rng.gen())).count() as i64;
                    count as i64 - 2 * odd
                })
                .sum())
        })
        .collect()
}

fn dl_parity(cipher: &TargetCipher, pair: DifferenceMaskPair, p: u128) -> bool {
    let (d, l) = (pair.difference.to_u128(), pair.mask.to_u128());
    ((cipher.encrypt_raw(p) ^ cipher.encrypt_raw(p ^ d)) & l).count_ones() & 1 == 1
}

/// Monte Carlo DL correlation of `rounds`-round `target` for `pair`.
pub fn estimate_dl_correlation(
    target: Target,
    rounds: usize,
    pair: DifferenceMaskPair,
    plan: SamplingPlan,
) -> Result<CorrelationEstimate, StatsError> {
    if pair.difference.is_zero() {
        return Err(StatsError::ZeroDifference);
    }
    plan.check(2 * target.branches().len() as u128)?;
    let raw_sums = signed_sums(
        &plan,
        |k| {
            Ok(TargetCipher::new(
                target,
                &derived_key(plan.seed, k),
                rounds,
            )?)
        },
        |c, p| dl_parity(c, pair, p),
    )?;
    Ok(CorrelationEstimate {
        kind: EstimateKind::DifferentialLinear,
        target,
        rounds,
        pair: Some(pair),
        null_pairs: Vec::new(),
        plan,
        raw_sums,
    })
}

/// Monte Carlo correlation of `input_mask . P + output_mask . E(P)` over
/// `span`.
pub fn estimate_linear_correlation_over(
    target: Target,
    span: RoundSpan,
    input_mask: State128,
    output_mask: State128,
    plan: SamplingPlan,
) -> Result<CorrelationEstimate, StatsError> {
    if input_mask.is_zero() != output_mask.is_zero() {
        return Err(StatsError::ZeroMask);
    }
    plan.check(target.branches().len() as u128)?;
    let (a, b) = (input_mask.to_u128(), output_mask.to_u128());
    let raw_sums = signed_sums(
        &plan,
        |k| {
            Ok(TargetCipher::new(
                target,
                &derived_key(plan.seed, k),
                span.rounds_needed(),
            )?)
        },
        |c, p| ((p & a).count_ones() + (c.eval_span_raw(p, span) & b).count_ones()) & 1 == 1,
    )?;
    Ok(CorrelationEstimate {
        kind: EstimateKind::Linear,
        target,
        rounds: span.rounds_needed(),
        pair: Some(DifferenceMaskPair::new(input_mask, output_mask)),
        null_pairs: Vec::new(),
        plan,
        raw_sums,
    })
}

/// Linear correlation of the keyed `rounds`-round permutation.
pub fn estimate_linear_correlation(
    target: Target,
    rounds: usize,
    input_mask: State128,
    output_mask: State128,
    plan: SamplingPlan,
) -> Result<CorrelationEstimate, StatsError> {
    estimate_linear_correlation_over(
        target,
        RoundSpan::full(rounds),
        input_mask,
        output_mask,
        plan,
    )
}

/// The DL estimator with a fresh uniformly random nonzero `(difference,
/// mask)` per key: the distribution an estimate shows when there is no
/// signal.
pub fn null_control(
    target: Target,
    rounds: usize,
    plan: SamplingPlan,
) -> Result<CorrelationEstimate, StatsError> {
    plan.check(2 * target.branches().len() as u128)?;
    let pairs: Vec<DifferenceMaskPair> = (0..plan.keys)
        .map(|k| {
            let mut rng = stream(plan.seed, StreamPurpose::Masks, k, 0);
            let mut nonzero = || loop {
                let v: u128 = rng.gen();
                if v != 0 {
                    break State128::from_u128(v);
                }
            };
            DifferenceMaskPair::new(nonzero(), nonzero())
        })
        .collect();
    let raw_sums = signed_sums(
        &plan,
        |k| {
            Ok((
                TargetCipher::new(target, &derived_key(plan.seed, k), rounds)?,
                pairs[k],
            ))
        },
        |(c, pair), p| dl_parity(c, *pair, p),
    )?;
    Ok(CorrelationEstimate {
        kind: EstimateKind::Null,
        target,
        rounds,
        pair: None,
        null_pairs: pairs,
        plan,
        raw_sums,
    })
}

/// Four standard errors: the detection threshold on `|mean|`.
pub fn null_bound(samples_per_key: u64, keys: usize) -> f64 {
    4.0 / (samples_per_key as f64 * keys as f64).sqrt()
}

/// DL correlation of an `width`-bit function by enumerating every input.
pub fn exhaustive_dl_correlation(
    width: usize,
    f: impl Fn(usize) -> usize,
    difference: usize,
    mask: usize,
) -> f64 {
    let size = 1usize << width;
    let sum: i64 = (0..size)
        .map(|x| {
            if ((f(x) ^ f(x ^ difference)) & mask).count_ones() % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum();
    sum as f64 / size as f64
}

#[cfg(test)]
mod tests {
    use gleeok_cipher::BranchId;

    use super::*;

    #[test]
    fn preconditions() {
        let plan = SamplingPlan::new(16, 1, 0);
        let zero = DifferenceMaskPair::new(State128::ZERO, State128::ONES);
        assert_eq!(
            estimate_dl_correlation(Target::Prf, 2, zero, plan),
            Err(StatsError::ZeroDifference)
        );
        let pair = DifferenceMaskPair::new(State128::ONES, State128::ONES);
        assert_eq!(
            estimate_dl_correlation(Target::Prf, 2, pair, SamplingPlan::new(0, 1, 0)),
            Err(StatsError::NoSamples)
        );
        assert_eq!(
            null_control(Target::Prf, 2, SamplingPlan::new(0, 4, 0)),
            Err(StatsError::NoSamples)
        );
        assert_eq!(
            estimate_linear_correlation(Target::Prf, 1, State128::ONES, State128::ZERO, plan),
            Err(StatsError::ZeroMask)
        );
    }

    #[test]
    fn budget_refusal_names_the_requirement() {
        let pair = DifferenceMaskPair::new(State128::ONES, State128::ONES);
        let plan = SamplingPlan::new(1 << 30, 8, 0);
        let err =
            estimate_dl_correlation(Target::Branch(BranchId::Branch1), 5, pair, plan).unwrap_err();
        match &err {
            StatsError::OverBudget { needed, .. } => assert_eq!(*needed, 1 << 34),
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("17179869184"));
    }

    #[test]
    fn zero_masks_give_correlation_one() {
        let e = estimate_linear_correlation(
            Target::Prf,
            3,
            State128::ZERO,
            State128::ZERO,
            SamplingPlan::new(1000, 3, 1),
        )
        .unwrap();
        assert_eq!(e.raw_sums, vec![1000; 3]);
        assert_eq!(e.squared(), 1.0);
    }

    #[test]
    fn report_lists_every_key() {
        let pair = DifferenceMaskPair::new(State128::unit(3), State128::unit(9));
        let e = estimate_dl_correlation(
            Target::Branch(BranchId::Branch3),
            1,
            pair,
            SamplingPlan::new(100, 2, 5),
        )
        .unwrap();
        let text = e.to_string();
        assert!(
            text.contains("key 0 ") && text.contains("key 1 ") && text.contains("log2_squared")
        );
    }
}
