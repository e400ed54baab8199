use std::fmt;

use gleeok_cipher::{BranchId, SboxLayerKind, Target, MAX_ROUNDS};
use gleeok_sbox::SboxName;

use crate::error::DegreeError;

pub const STATE_BITS: usize = 128;

/// `n - ceil((n - deg_g) / deg_f_inv)`.
pub fn carlet_step(n: usize, deg_g: usize, deg_f_inv: usize) -> Result<usize, DegreeError> {
    if deg_g > n {
        return Err(DegreeError::DegreeAboveWidth {
            degree: deg_g,
            width: n,
        });
    }
    if deg_f_inv == 0 {
        return Err(DegreeError::ZeroInverseDegree);
    }
    Ok(n - (n - deg_g).div_ceil(deg_f_inv))
}

/// Degrees of a Sbox layer and of its inverse, from the truth tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerDegrees {
    pub forward: usize,
    pub inverse: usize,
}

pub fn layer_degrees(kind: SboxLayerKind) -> LayerDegrees {
    let sboxes: &[SboxName] = match kind {
        SboxLayerKind::S3S5 => &[SboxName::S3, SboxName::S5],
        SboxLayerKind::S4 => &[SboxName::S4],
    };
    let mut out = LayerDegrees {
        forward: 0,
        inverse: 0,
    };
    for name in sboxes {
        let spec = name.spec();
        out.forward = out.forward.max(spec.algebraic_degree());
        out.inverse = out.inverse.max(
            spec.inverse()
                .expect("embedded Sboxes are bijective")
                .algebraic_degree(),
        );
    }
    out
}

/// Which bound was tighter in a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Trivial,
    Carlet,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Trivial => "trivial",
            Provenance::Carlet => "carlet",
        })
    }
}

/// Per-round degree upper bounds; `bounds[r - 1]` is the bound after `r`
/// rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub target: Target,
    pub bounds: Vec<usize>,
    pub provenance: Vec<Provenance>,
}

impl DegreeProfile {
    /// Bound after `rounds` rounds, if computed.
    pub fn bound(&self, rounds: usize) -> Option<usize> {
        rounds
            .checked_sub(1)
            .and_then(|i| self.bounds.get(i))
            .copied()
    }

    pub fn rounds(&self) -> usize {
        self.bounds.len()
    }
}

impl fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# degree profile: {}", self.target)?;
        writeln!(f, "# round bound provenance")?;
        for (i, (b, p)) in self.bounds.iter().zip(&self.provenance).enumerate() {
            writeln!(f, "{} {b} {p}", i + 1)?;
        }
        Ok(())
    }
}

fn branch_profile(branch: BranchId, rounds: usize) -> (Vec<usize>, Vec<Provenance>) {
    let deg = layer_degrees(branch.sbox_layer());
    let cap = STATE_BITS - 1;
    let mut bounds = Vec::with_capacity(rounds);
    let mut provenance = Vec::with_capacity(rounds);
    let mut current = deg.forward.min(cap);
    bounds.push(current);
    provenance.push(Provenance::Trivial);
    for _ in 1..rounds {
        let trivial = deg.forward.saturating_mul(current);
        let carlet =
            carlet_step(STATE_BITS, current, deg.inverse).expect("bounds stay below the width");
        let (next, source) = if carlet < trivial {
            (carlet, Provenance::Carlet)
        } else {
            (trivial, Provenance::Trivial)
        };
        current = next.min(cap);
        bounds.push(current);
        provenance.push(source);
    }
    (bounds, provenance)
}

/// Degree bounds for rounds `1 ..= rounds`. The PRF takes the per-round
/// maximum over its branches.
pub fn degree_profile(target: Target, rounds: usize) -> Result<DegreeProfile, DegreeError> {
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(DegreeError::RoundCount {
            rounds,
            max: MAX_ROUNDS,
        });
    }
    let per_branch: Vec<_> = target
        .branches()
        .iter()
        .map(|&b| branch_profile(b, rounds))
        .collect();
    let mut bounds = Vec::with_capacity(rounds);
    let mut provenance = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let best = per_branch
            .iter()
            .max_by_key(|(b, p)| (b[r], p[r] == Provenance::Carlet))
            .expect("at least one branch");
        bounds.push(best.0[r]);
        provenance.push(best.1[r]);
    }
    Ok(DegreeProfile {
        target,
        bounds,
        provenance,
    })
}
