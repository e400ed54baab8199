use std::fmt;

use gleeok_cipher::{BitOrder, BranchId, Target};

use crate::error::StatsError;
use crate::estimate::{
    estimate_dl_correlation, CorrelationEstimate, DifferenceMaskPair, SamplingPlan,
};

/// Tolerance in `log2` of the squared correlation.
pub const DL_TOLERANCE: f64 = 0.5;

/// A published DL measurement: difference and mask as printed, with the
/// experimental squared correlation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PublishedDlCase {
    pub target: Target,
    pub rounds: usize,
    pub difference_hex: &'static str,
    pub mask_hex: &'static str,
    pub experimental_log2: f64,
    pub estimated_log2: f64,
    pub plan: SamplingPlan,
}

impl PublishedDlCase {
    pub fn pair(&self, order: BitOrder) -> DifferenceMaskPair {
        DifferenceMaskPair::from_hex_with(self.difference_hex, self.mask_hex, order)
            .expect("published hex is valid")
    }

    pub fn estimate(&self, order: BitOrder) -> Result<CorrelationEstimate, StatsError> {
        estimate_dl_correlation(self.target, self.rounds, self.pair(order), self.plan)
    }
}

/// Sample plans: the PRF correlation varies strongly with the key, so that
/// case spreads its pairs over many keys; the branch cases have little key
/// variance and need many pairs per key instead.
pub const PUBLISHED_DL_CASES: [PublishedDlCase; 4] = [
    PublishedDlCase {
        target: Target::Prf,
        rounds: 3,
        difference_hex: "0x200000000000000000000",
        mask_hex: "0x200000000000000000000000000",
        experimental_log2: -11.70,
        estimated_log2: -11.72,
        plan: SamplingPlan {
            samples_per_key: 1 << 16,
            keys: 1024,
            seed: 0x3a11,
            budget: 1 << 32,
        },
    },
    PublishedDlCase {
        target: Target::Branch(BranchId::Branch1),
        rounds: 5,
        difference_hex: "0x6000",
        mask_hex: "0x89df5aa33e89239079ebd0c7d964685d",
        experimental_log2: -18.85,
        estimated_log2: -18.86,
        plan: SamplingPlan {
            samples_per_key: 1 << 22,
            keys: 64,
            seed: 0x5b01,
            budget: 1 << 32,
        },
    },
    PublishedDlCase {
        target: Target::Branch(BranchId::Branch2),
        rounds: 5,
        difference_hex: "0xe00000000000000000000000",
        mask_hex: "0x7e656d6aacfa669e41e7a7431f659180",
        experimental_log2: -18.87,
        estimated_log2: -18.86,
        plan: SamplingPlan {
            samples_per_key: 1 << 22,
            keys: 64,
            seed: 0x5b02,
            budget: 1 << 32,
        },
    },
    PublishedDlCase {
        target: Target::Branch(BranchId::Branch3),
        rounds: 6,
        difference_hex: "0x800000000000000",
        mask_hex: "0x40000040000000000000000",
        experimental_log2: -21.52,
        estimated_log2: -22.00,
        plan: SamplingPlan {
            samples_per_key: 1 << 26,
            keys: 16,
            seed: 0x6b03,
            budget: 1 << 32,
        },
    },
];

/// One case measured under one bit order.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRow {
    pub case: PublishedDlCase,
    pub order: BitOrder,
    pub measured_log2: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    pub rows: Vec<CalibrationRow>,
    /// The single order under which every case reproduces, if there is one.
    pub locked: Option<BitOrder>,
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# target rounds order measured published ok")?;
        for r in &self.rows {
            writeln!(
                f,
                "{} {} {} {:.2} {:.2} {}",
                r.case.target,
                r.case.rounds,
                order_name(r.order),
                r.measured_log2,
                r.case.experimental_log2,
                r.within_tolerance
            )?;
        }
        match self.locked {
            Some(o) => write!(f, "locked {}", order_name(o)),
            None => write!(f, "locked none"),
        }
    }
}

pub fn order_name(order: BitOrder) -> &'static str {
    match order {
        BitOrder::MsbFirst => "msb-first",
        BitOrder::LsbFirst => "lsb-first",
    }
}

/// Re-runs each case with its hex values read under both bit orders and
/// locks the order that reproduces all of them.
pub fn calibrate_bit_order(cases: &[PublishedDlCase]) -> Result<CalibrationReport, StatsError> {
    let mut rows = Vec::new();
    for order in [BitOrder::MsbFirst, BitOrder::LsbFirst] {
        for case in cases {
            let e = case.estimate(order)?;
            rows.push(CalibrationRow {
                case: *case,
                order,
                measured_log2: e.log2_squared(),
                within_tolerance: e.within(case.experimental_log2, DL_TOLERANCE),
            });
        }
    }
    let passing: Vec<BitOrder> = [BitOrder::MsbFirst, BitOrder::LsbFirst]
        .into_iter()
        .filter(|&o| {
            rows.iter()
                .filter(|r| r.order == o)
                .all(|r| r.within_tolerance)
        })
        .collect();
    let locked = if passing.len() == 1 {
        Some(passing[0])
    } else {
        None
    };
    Ok(CalibrationReport { rows, locked })
}
