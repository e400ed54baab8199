use std::fmt;

use crate::error::CipherError;

/// A stretch of half-rounds.
///
/// Position `2r` is the state after full round `r` (position 0 is the
/// cipher input); position `2r - 1` sits between the S-half and the L-half
/// of round `r`. Evaluating `[start, end]` applies halves `start+1 ..= end`;
/// odd halves are Sbox layers, even halves are `θ, π, RK, RC`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoundSpan {
    start: usize,
    end: usize,
    whitening: bool,
}

impl RoundSpan {
    pub fn new(start: usize, end: usize, whitening: bool) -> Result<Self, CipherError> {
        if start > end {
            return Err(CipherError::Span {
                start,
                end,
                rounds: end.div_ceil(2),
            });
        }
        Ok(RoundSpan {
            start,
            end,
            whitening,
        })
    }

    /// Whitening plus `rounds` full rounds: the keyed permutation.
    pub const fn full(rounds: usize) -> Self {
        RoundSpan {
            start: 0,
            end: 2 * rounds,
            whitening: true,
        }
    }

    /// Rounds `first ..= last` (1-based) without whitening.
    pub const fn rounds(first: usize, last: usize) -> Self {
        RoundSpan {
            start: 2 * (first - 1),
            end: 2 * last,
            whitening: false,
        }
    }

    /// The L-half of round 1 followed by `rounds` full rounds.
    pub const fn half_then_rounds(rounds: usize) -> Self {
        RoundSpan {
            start: 1,
            end: 2 + 2 * rounds,
            whitening: false,
        }
    }

    pub const fn start(&self) -> usize {
        self.start
    }

    pub const fn end(&self) -> usize {
        self.end
    }

    pub const fn whitening(&self) -> bool {
        self.whitening
    }

    /// Number of full rounds whose material the span touches.
    pub const fn rounds_needed(&self) -> usize {
        self.end.div_ceil(2)
    }

    pub fn split_at(&self, mid: usize) -> Result<(RoundSpan, RoundSpan), CipherError> {
        if mid < self.start || mid > self.end {
            return Err(CipherError::Span {
                start: self.start,
                end: self.end,
                rounds: self.rounds_needed(),
            });
        }
        Ok((
            RoundSpan {
                start: self.start,
                end: mid,
                whitening: self.whitening,
            },
            RoundSpan {
                start: mid,
                end: self.end,
                whitening: false,
            },
        ))
    }
}

impl fmt::Display for RoundSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = if self.whitening { "+wk" } else { "" };
        write!(
            f,
            "[{}..{}]{w}",
            self.start as f64 / 2.0,
            self.end as f64 / 2.0
        )
    }
}
