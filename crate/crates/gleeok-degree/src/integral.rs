use std::fmt;

use gleeok_cipher::Target;

use crate::error::DegreeError;
use crate::profile::{degree_profile, STATE_BITS};

/// A set of `2^active_bits` plaintexts spanning an affine subspace whose
/// images XOR to zero on all 128 output bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralDistinguisher {
    pub target: Target,
    /// Full rounds covered by the degree bound.
    pub rounds: usize,
    /// A leading linear half-round is prepended.
    pub leading_half: bool,
    pub degree_bound: usize,
    pub active_bits: usize,
}

impl IntegralDistinguisher {
    /// Length in half-rounds.
    pub fn half_rounds(&self) -> usize {
        2 * self.rounds + usize::from(self.leading_half)
    }

    pub fn data_log2(&self) -> usize {
        self.active_bits
    }
}

impl fmt::Display for IntegralDistinguisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = if self.leading_half { ".5" } else { "" };
        write!(
            f,
            "{} {}{half} rounds: degree <= {}, data 2^{}",
            self.target, self.rounds, self.degree_bound, self.active_bits
        )
    }
}

/// Every distinguisher the degree profile supports up to `max_rounds`: for
/// each round count with bound `d <= 126`, one with `d + 1` active bits and
/// its variant with a leading linear half-round at the same data.
pub fn derive_integral_distinguishers(
    target: Target,
    max_rounds: usize,
) -> Result<Vec<IntegralDistinguisher>, DegreeError> {
    let profile = degree_profile(target, max_rounds)?;
    let mut out = Vec::new();
    for (i, &bound) in profile.bounds.iter().enumerate() {
        if bound + 1 >= STATE_BITS {
            continue;
        }
        for leading_half in [false, true] {
            out.push(IntegralDistinguisher {
                target,
                rounds: i + 1,
                leading_half,
                degree_bound: bound,
                active_bits: bound + 1,
            });
        }
    }
    Ok(out)
}

/// One line per distinguisher: `target half_rounds rounds degree data_log2`.
pub fn render_distinguishers(list: &[IntegralDistinguisher]) -> String {
    let mut s = String::from("# target rounds degree data_log2\n");
    for d in list {
        let half = if d.leading_half { ".5" } else { "" };
        s.push_str(&format!(
            "{} {}{half} {} {}\n",
            d.target,
            d.rounds,
            d.degree_bound,
            d.data_log2()
        ));
    }
    s
}
