use std::collections::BTreeSet;
use std::fmt;

use gleeok_cipher::BitOrder;

use crate::error::SboxError;
use crate::ineq::{feasible_points, IneqSystem};
use crate::spec::{SboxName, SboxSpec};
use crate::table::{build_table, ConnTable, TableKind};

/// One encoded table entry: `input -> output` with its weight and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub input: usize,
    pub output: usize,
    pub weight: i64,
    pub negative: bool,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}->{:#x} w={}", self.input, self.output, self.weight)?;
        if self.negative {
            f.write_str(" (-)")?;
        }
        Ok(())
    }
}

/// How 0/1 points of a system map to table entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointEncoding {
    sbox: SboxName,
    kind: TableKind,
    input: Vec<String>,
    output: Vec<String>,
    order: BitOrder,
    weight: Vec<(i64, String)>,
    sign: Option<String>,
}

impl PointEncoding {
    pub fn new(
        sbox: SboxName,
        kind: TableKind,
        input: Vec<String>,
        output: Vec<String>,
        order: BitOrder,
        weight: Vec<(i64, String)>,
        sign: Option<String>,
    ) -> Result<Self, String> {
        let n = sbox.width();
        if input.len() != n || output.len() != n {
            return Err(format!("{sbox} needs {n} input and {n} output variables"));
        }
        if (kind == TableKind::DlctSigned) != sign.is_some() {
            return Err("a sign variable is required exactly for signed DLCT systems".into());
        }
        let enc = PointEncoding {
            sbox,
            kind,
            input,
            output,
            order,
            weight,
            sign,
        };
        let vars = enc.variables();
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err("input, output, weight and sign variables must be distinct".into());
        }
        Ok(enc)
    }

    pub fn sbox(&self) -> SboxName {
        self.sbox
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn order(&self) -> BitOrder {
        self.order
    }

    pub fn input_vars(&self) -> &[String] {
        &self.input
    }

    pub fn output_vars(&self) -> &[String] {
        &self.output
    }

    pub fn sign_var(&self) -> Option<&str> {
        self.sign.as_deref()
    }

    pub fn weight_terms(&self) -> &[(i64, String)] {
        &self.weight
    }

    /// Weight variables in order of first appearance.
    pub fn weight_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, v) in &self.weight {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// System variable order: inputs, outputs, weights, sign.
    pub fn variables(&self) -> Vec<String> {
        let mut vars = self.input.clone();
        vars.extend(self.output.iter().cloned());
        vars.extend(self.weight_vars());
        vars.extend(self.sign.iter().cloned());
        vars
    }

    /// Copy with the opposite bit order.
    pub fn with_order(&self, order: BitOrder) -> Self {
        PointEncoding {
            order,
            ..self.clone()
        }
    }

    fn pack(&self, bits: &[u8]) -> usize {
        let n = bits.len();
        bits.iter().enumerate().fold(0, |acc, (i, &b)| {
            let pos = match self.order {
                BitOrder::MsbFirst => n - 1 - i,
                BitOrder::LsbFirst => i,
            };
            acc | ((b as usize) << pos)
        })
    }

    /// Bits of `value` in listed-variable order.
    pub fn unpack(&self, value: usize) -> Vec<u8> {
        let n = self.sbox.width();
        (0..n)
            .map(|i| {
                let pos = match self.order {
                    BitOrder::MsbFirst => n - 1 - i,
                    BitOrder::LsbFirst => i,
                };
                ((value >> pos) & 1) as u8
            })
            .collect()
    }

    /// Reads a point laid out in [`variables`](Self::variables) order.
    pub fn decode(&self, point: &[u8]) -> Transition {
        let n = self.sbox.width();
        let vars = self.variables();
        let value_of =
            |name: &str| point[vars.iter().position(|v| v == name).expect("declared")] as i64;
        Transition {
            input: self.pack(&point[..n]),
            output: self.pack(&point[n..2 * n]),
            weight: self.weight.iter().map(|(c, v)| c * value_of(v)).sum(),
            negative: self.sign.as_deref().is_some_and(|s| value_of(s) == 1),
        }
    }

    /// The transitions the system should admit, derived from the table.
    pub fn expected(&self, table: &ConnTable) -> BTreeSet<Transition> {
        let n = table.size();
        let mut out = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                let e = table.get(a, b);
                if e == 0 {
                    continue;
                }
                // A non-power-of-two entry gets an impossible weight so it
                // always surfaces as missing.
                let weight = table.weight(a, b).map_or(-1, i64::from);
                out.insert(Transition {
                    input: a,
                    output: b,
                    weight,
                    negative: self.kind == TableKind::DlctSigned && e < 0,
                });
            }
        }
        out
    }
}

/// A named system together with its encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSystem {
    pub name: String,
    pub encoding: PointEncoding,
    pub system: IneqSystem,
}

/// Outcome of comparing a system's feasible points with a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub name: String,
    pub order: BitOrder,
    pub feasible_points: usize,
    pub expected_transitions: usize,
    /// Admitted by the system but absent from the table.
    pub spurious: Vec<Transition>,
    /// In the table but not admitted.
    pub missing: Vec<Transition>,
}

impl CharacterizationReport {
    pub fn matches(&self) -> bool {
        self.spurious.is_empty() && self.missing.is_empty()
    }
}

impl fmt::Display for CharacterizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = match self.order {
            BitOrder::MsbFirst => "msb-first",
            BitOrder::LsbFirst => "lsb-first",
        };
        write!(
            f,
            "{}: {} ({order}, {} feasible points, {} table transitions, {} spurious, {} missing)",
            self.name,
            if self.matches() { "match" } else { "MISMATCH" },
            self.feasible_points,
            self.expected_transitions,
            self.spurious.len(),
            self.missing.len()
        )
    }
}

/// Compares `(input, output, weight sum, sign)` tuples of the feasible
/// points with those of the table. Weight variables are compared through
/// their weighted sum, so any split of the same sum is accepted.
pub fn verify_characterization(
    name: &str,
    system: &IneqSystem,
    sbox: &SboxSpec,
    encoding: &PointEncoding,
) -> Result<CharacterizationReport, SboxError> {
    let expected_vars = encoding.variables();
    if system.vars() != expected_vars.as_slice() {
        return Err(SboxError::ArityMismatch {
            expected: expected_vars.len(),
            got: system.vars().len(),
        });
    }
    let table = build_table(sbox, encoding.kind());
    let expected = encoding.expected(&table);
    let points = feasible_points(system)?;
    let found: BTreeSet<Transition> = points.iter().map(|p| encoding.decode(p)).collect();
    Ok(CharacterizationReport {
        name: name.to_string(),
        order: encoding.order(),
        feasible_points: points.len(),
        expected_transitions: expected.len(),
        spurious: found.difference(&expected).copied().collect(),
        missing: expected.difference(&found).copied().collect(),
    })
}

/// Runs the check under the declared order and, if that fails, under the
/// opposite order too; returns both reports (declared first).
pub fn verify_with_order_fallback(
    entry: &EncodedSystem,
) -> Result<(CharacterizationReport, Option<CharacterizationReport>), SboxError> {
    let spec = entry.encoding.sbox().spec();
    let declared = verify_characterization(&entry.name, &entry.system, &spec, &entry.encoding)?;
    if declared.matches() {
        return Ok((declared, None));
    }
    let flipped = match entry.encoding.order() {
        BitOrder::MsbFirst => BitOrder::LsbFirst,
        BitOrder::LsbFirst => BitOrder::MsbFirst,
    };
    let alt = verify_characterization(
        &entry.name,
        &entry.system,
        &spec,
        &entry.encoding.with_order(flipped),
    )?;
    Ok((declared, Some(alt)))
}
