use std::collections::BTreeMap;
use std::fmt;

use crate::backend::{MilpBackend, Optimum, DEFAULT_POOL_CAP};
use crate::build::{refine_to_signed, TrailModel, TrailPair};
use crate::error::MilpError;
use crate::program::Solution;

pub const DEFAULT_SPAN: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Weights `W ..= W + span` are aggregated.
    pub span: i64,
    pub pool_cap: usize,
    /// Stop collecting optimal pairs after this many.
    pub max_pairs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            span: DEFAULT_SPAN,
            pool_cap: DEFAULT_POOL_CAP,
            max_pairs: 4096,
        }
    }
}

/// Every `(Δ, λ)` reaching the stage-one optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCollection {
    pub weight: Option<i64>,
    pub pairs: Vec<TrailPair>,
    /// Stopped at `max_pairs` before the optimum was exhausted.
    pub truncated: bool,
}

/// Repeatedly solves the stage-one model, excluding each optimal pair
/// with a cutting-off inequality, until the optimum rises.
pub fn collect_optimal_pairs(
    model: &TrailModel,
    backend: &dyn MilpBackend,
    max_pairs: usize,
) -> Result<PairCollection, MilpError> {
    let mut work = model.clone();
    let mut collection = PairCollection {
        weight: None,
        pairs: Vec::new(),
        truncated: false,
    };
    while let Optimum::Optimal { value, solution } = backend.optimize(&work.program)? {
        if collection.weight.is_some_and(|w| value > w) {
            break;
        }
        if collection.pairs.len() == max_pairs {
            collection.truncated = true;
            break;
        }
        collection.weight = Some(value);
        let pair = work
            .pair_of(&solution)
            .ok_or_else(|| MilpError::SolverFailed {
                status: Some(0),
                message: "solution lacks input or output bits".into(),
            })?;
        collection.pairs.push(pair);
        work.cut_pair(&pair)?;
    }
    Ok(collection)
}

/// Trails of one weight, with signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightClass {
    pub weight: i64,
    pub positive: u64,
    pub negative: u64,
}

impl WeightClass {
    pub fn trails(&self) -> u64 {
        self.positive + self.negative
    }

    pub fn net(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub pair: TrailPair,
    pub classes: Vec<WeightClass>,
    /// Some weight class hit the pool cap.
    pub truncated: bool,
}

impl Aggregate {
    /// `Σ (#positive - #negative) · 2^-w`.
    pub fn correlation(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.net() as f64 * 2f64.powi(-(c.weight as i32)))
            .sum()
    }

    /// `log2 |c|`, or `None` when the signed contributions cancel.
    pub fn log2_abs(&self) -> Option<f64> {
        let c = self.correlation();
        (c != 0.0).then(|| c.abs().log2())
    }

    pub fn trails(&self) -> u64 {
        self.classes.iter().map(WeightClass::trails).sum()
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pair)?;
        match self.log2_abs() {
            Some(l) => {
                let sign = if self.correlation() < 0.0 { "-" } else { "+" };
                write!(f, "correlation {sign}2^{l:.2}")?
            }
            None => f.write_str("correlation 0")?,
        }
        write!(f, " from {} trails", self.trails())?;
        if self.truncated {
            f.write_str(" (pool cap reached)")?;
        }
        Ok(())
    }
}

fn projection(model: &TrailModel, solution: &Solution) -> Vec<i64> {
    model
        .meta
        .trail_vars
        .iter()
        .map(|v| solution.get(v).copied().unwrap_or(0))
        .collect()
}

/// Enumerates signed trails of weight `from ..= from + span` for `pair`
/// and sums their signed contributions.
pub fn aggregate_correlation(
    model: &TrailModel,
    pair: &TrailPair,
    from: i64,
    options: &SearchOptions,
    backend: &dyn MilpBackend,
) -> Result<Aggregate, MilpError> {
    let mut aggregate = Aggregate {
        pair: *pair,
        classes: Vec::new(),
        truncated: false,
    };
    for weight in from..=from + options.span {
        let refined = refine_to_signed(model, pair, weight)?;
        let set = backend.enumerate(&refined.program, options.pool_cap)?;
        aggregate.truncated |= set.truncated;
        let sign = refined
            .meta
            .trail_sign
            .as_deref()
            .ok_or(MilpError::NotDlModel)?;
        let mut trails: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for s in &set.solutions {
            trails.insert(projection(&refined, s), s.get(sign).copied().unwrap_or(0));
        }
        let negative = trails.values().filter(|&&s| s == 1).count() as u64;
        let class = WeightClass {
            weight,
            positive: trails.len() as u64 - negative,
            negative,
        };
        if class.trails() > 0 {
            aggregate.classes.push(class);
        }
    }
    Ok(aggregate)
}

/// Largest `|c|`; ties go to the smallest pair.
pub fn select_best_distinguisher(candidates: &[Aggregate]) -> Option<&Aggregate> {
    candidates.iter().min_by(|a, b| {
        b.correlation()
            .abs()
            .total_cmp(&a.correlation().abs())
            .then_with(|| a.pair.cmp(&b.pair))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DlSearchReport {
    pub pairs: PairCollection,
    pub candidates: Vec<Aggregate>,
}

impl DlSearchReport {
    pub fn best(&self) -> Option<&Aggregate> {
        select_best_distinguisher(&self.candidates)
    }
}

/// Stage one, then stage two on every optimal pair.
pub fn two_stage_search(
    model: &TrailModel,
    options: &SearchOptions,
    backend: &dyn MilpBackend,
) -> Result<DlSearchReport, MilpError> {
    let pairs = collect_optimal_pairs(model, backend, options.max_pairs)?;
    let mut candidates = Vec::new();
    if let Some(w) = pairs.weight {
        for pair in &pairs.pairs {
            candidates.push(aggregate_correlation(model, pair, w, options, backend)?);
        }
    }
    Ok(DlSearchReport { pairs, candidates })
}
