use std::fmt;

use gleeok_cipher::{LinearParams, PiParam, ThetaParams};
use rayon::prelude::*;

use crate::diffusion::{original_threshold, DiffusionConvention, DiffusionKernel};
use crate::error::LinLayerError;

/// Published candidate counts the diffusion convention is calibrated on.
pub const EXPECTED_FULL_DIFFUSION: u64 = 4352;
pub const EXPECTED_RETAINED: u64 = 4096;

/// Every odd multiplier below 128.
pub fn all_multipliers() -> Vec<usize> {
    (1..128).step_by(2).collect()
}

/// Counts and survivors of the two diffusion filters over all offset
/// triples for the given multipliers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub convention: DiffusionConvention,
    pub multipliers: Vec<usize>,
    pub threshold: u32,
    pub candidates: u64,
    pub full_diffusion: u64,
    pub retained: Vec<LinearParams>,
}

impl ScanReport {
    pub fn retained_count(&self) -> u64 {
        self.retained.len() as u64
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "convention {} ({} multipliers)",
            self.convention,
            self.multipliers.len()
        )?;
        writeln!(f, "candidates      {}", self.candidates)?;
        writeln!(f, "full diffusion  {}", self.full_diffusion)?;
        write!(
            f,
            "retained        {} (min influence >= {})",
            self.retained.len(),
            self.threshold
        )
    }
}

fn offset_triples() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(341_376);
    for a in 0..128 {
        for b in a + 1..128 {
            for c in b + 1..128 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Runs both filters over `C(128,3)` offset triples for each multiplier,
/// one worker per multiplier.
pub fn enumerate_viable_params(
    convention: DiffusionConvention,
    multipliers: &[usize],
) -> Result<ScanReport, LinLayerError> {
    let pis: Vec<PiParam> = multipliers
        .iter()
        .map(|&p| PiParam::new(p))
        .collect::<Result<_, _>>()?;
    let threshold = original_threshold(convention);
    let triples = offset_triples();
    let per_pi: Vec<(u64, Vec<LinearParams>)> = pis
        .par_iter()
        .map(|&pi| {
            let kernel = DiffusionKernel::new(pi);
            let mut full = 0;
            let mut kept = Vec::new();
            for &t in &triples {
                let (is_full, min) = kernel.measure(t, convention);
                if is_full {
                    full += 1;
                    if min >= threshold {
                        let theta = ThetaParams::new(t[0], t[1], t[2]).expect("distinct offsets");
                        kept.push(LinearParams { theta, pi });
                    }
                }
            }
            (full, kept)
        })
        .collect();
    let mut report = ScanReport {
        convention,
        multipliers: multipliers.to_vec(),
        threshold,
        candidates: (pis.len() * triples.len()) as u64,
        full_diffusion: 0,
        retained: Vec::new(),
    };
    for (full, kept) in per_pi {
        report.full_diffusion += full;
        report.retained.extend(kept);
    }
    Ok(report)
}

/// Scans under every candidate convention and locks the one whose counts
/// match the published ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConventionCalibration {
    pub reports: Vec<ScanReport>,
    pub locked: Option<DiffusionConvention>,
}

impl fmt::Display for ConventionCalibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            writeln!(
                f,
                "{:<10} full {:>9}  retained {:>9}",
                r.convention.to_string(),
                r.full_diffusion,
                r.retained.len()
            )?;
        }
        match self.locked {
            Some(c) => write!(f, "locked: {c}"),
            None => write!(f, "locked: none (no convention reproduces {EXPECTED_FULL_DIFFUSION}/{EXPECTED_RETAINED})"),
        }
    }
}

pub fn calibrate_convention() -> Result<ConventionCalibration, LinLayerError> {
    let multipliers = all_multipliers();
    let reports: Vec<ScanReport> = DiffusionConvention::CANDIDATES
        .iter()
        .map(|&c| enumerate_viable_params(c, &multipliers))
        .collect::<Result<_, _>>()?;
    let locked = reports
        .iter()
        .find(|r| {
            r.full_diffusion == EXPECTED_FULL_DIFFUSION && r.retained_count() == EXPECTED_RETAINED
        })
        .map(|r| r.convention);
    Ok(ConventionCalibration { reports, locked })
}

/// One line per retained candidate: `t0 t1 t2 p`.
pub fn render_candidates(params: &[LinearParams]) -> String {
    params
        .iter()
        .map(|lp| {
            let [t0, t1, t2] = lp.theta.offsets();
            format!("{t0} {t1} {t2} {}\n", lp.pi.multiplier())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_count() {
        assert_eq!(offset_triples().len(), 341_376);
        assert_eq!(all_multipliers().len(), 64);
    }

    #[test]
    fn even_multiplier_rejected() {
        assert!(enumerate_viable_params(DiffusionConvention::LOCKED, &[12]).is_err());
    }
}
