use std::fmt;

/// The four key-recovery variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackVariant {
    SevenRound,
    SevenRoundPrecomputed,
    EightRound,
    EightRoundPrecomputed,
}

impl AttackVariant {
    pub const ALL: [AttackVariant; 4] = [
        AttackVariant::SevenRound,
        AttackVariant::SevenRoundPrecomputed,
        AttackVariant::EightRound,
        AttackVariant::EightRoundPrecomputed,
    ];

    pub fn rounds(self) -> usize {
        match self {
            AttackVariant::SevenRound | AttackVariant::SevenRoundPrecomputed => 7,
            _ => 8,
        }
    }

    pub fn precomputed(self) -> bool {
        matches!(
            self,
            AttackVariant::SevenRoundPrecomputed | AttackVariant::EightRoundPrecomputed
        )
    }
}

/// One additive term `coefficient * 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub exponent: f64,
}

impl Term {
    fn log2(&self) -> f64 {
        self.exponent + self.coefficient.log2()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    pub variant: AttackVariant,
    pub data_log2: f64,
    pub time_terms: Vec<Term>,
    /// `None` when memory is negligible.
    pub memory_log2_bytes: Option<f64>,
}

impl ComplexityReport {
    pub fn time_log2(&self) -> f64 {
        let max = self
            .time_terms
            .iter()
            .map(Term::log2)
            .fold(f64::NEG_INFINITY, f64::max);
        max + self
            .time_terms
            .iter()
            .map(|t| (t.log2() - max).exp2())
            .sum::<f64>()
            .log2()
    }
}

/// `2^x` with one decimal, dropping a trailing `.0`.
pub fn render_power(log2: f64) -> String {
    let s = format!("{log2:.1}");
    format!("2^{}", s.strip_suffix(".0").unwrap_or(&s))
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let memory = match self.memory_log2_bytes {
            Some(m) => format!("{} B", render_power(m)),
            None => "negligible".to_string(),
        };
        let terms: Vec<String> = self
            .time_terms
            .iter()
            .map(|t| {
                if t.coefficient == 1.0 {
                    format!("2^{}", t.exponent)
                } else {
                    format!("{}*2^{}", t.coefficient, t.exponent)
                }
            })
            .collect();
        write!(
            f,
            "{} rounds{}: time {} ({}), memory {}, data {} CP",
            self.variant.rounds(),
            if self.variant.precomputed() {
                " (precomputed)"
            } else {
                ""
            },
            render_power(self.time_log2()),
            terms.join(" + "),
            memory,
            render_power(self.data_log2)
        )
    }
}

/// Bytes per stored plaintext-ciphertext pair.
const PAIR_BYTES_LOG2: f64 = 5.0;

/// Accounting for one variant.
///
/// Seven rounds: each of the 31 gadget positions costs 16 guesses times two
/// gadget sets of `2^123` queries, plus `2^132` for the remaining key bits;
/// storing the `2^124` distinct pairs replaces the queries with one pass.
/// Eight rounds: 32 positions over `2^127` structures, then `2^128`.
pub fn complexity_report(variant: AttackVariant) -> ComplexityReport {
    let t = |coefficient: f64, exponent: f64| Term {
        coefficient,
        exponent,
    };
    let (data, terms, memory) = match variant {
        AttackVariant::SevenRound => (124.0, vec![t(2.0 * 31.0, 123.0 + 4.0), t(1.0, 132.0)], None),
        AttackVariant::SevenRoundPrecomputed => (
            124.0,
            vec![t(1.0, 124.0), t(1.0, 132.0)],
            Some(124.0 + PAIR_BYTES_LOG2),
        ),
        AttackVariant::EightRound => (128.0, vec![t(2.0 * 32.0, 127.0 + 4.0), t(1.0, 128.0)], None),
        AttackVariant::EightRoundPrecomputed => (
            128.0,
            vec![t(1.0, 128.0), t(1.0, 128.0)],
            Some(128.0 + PAIR_BYTES_LOG2),
        ),
    };
    ComplexityReport {
        variant,
        data_log2: data,
        time_terms: terms,
        memory_log2_bytes: memory,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rendering() {
        assert_eq!(render_power(133.554), "2^133.6");
        assert_eq!(render_power(132.0056), "2^132");
    }
}
