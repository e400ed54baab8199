//! Plain-text assets for reference tables and inequality systems.
//!
//! Both formats are line based. `#` starts a comment that runs to the end
//! of the line; blank lines are ignored. A header of `key: value` lines
//! comes first.
//!
//! Reference table:
//!
//! ```text
//! table: ddt | lat | dlct | dlct-signed
//! sbox: s3 | s4 | s5
//! <row in hex>: <2^n signed decimal entries>
//! ```
//!
//! Every row `0 .. 2^n - 1` must appear exactly once.
//!
//! Inequality system:
//!
//! ```text
//! system: <name>
//! table: <kind>
//! sbox: <name>
//! input: <n variable names>
//! output: <n variable names>
//! order: msb-first | lsb-first      # which listed input variable is the MSB
//! weight: <linear form, or 0>
//! sign: <variable>                  # signed DLCT only
//! <linear form> >= <integer>        # one per inequality
//! ```
//!
//! With `order: msb-first` the first listed input variable is the most
//! significant bit of the Sbox input; `lsb-first` makes it the least
//! significant. The system's variable order is inputs, outputs, the weight
//! variables in order of appearance, then the sign variable.

use gleeok_cipher::BitOrder;

use crate::encoding::{EncodedSystem, PointEncoding};
use crate::error::SboxError;
use crate::ineq::{parse_linear, IneqSystem};
use crate::spec::SboxName;
use crate::table::{ConnTable, TableKind};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once(':')?;
    (k.trim() == key).then(|| v.trim())
}

/// Parses a reference table asset.
pub fn parse_table(text: &str) -> Result<(SboxName, ConnTable), SboxError> {
    let mut kind: Option<TableKind> = None;
    let mut sbox: Option<SboxName> = None;
    let mut rows: Vec<Option<Vec<i32>>> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(v) = header_value(line, "table") {
            kind = Some(
                v.parse()
                    .map_err(|_| SboxError::asset(line_no, format!("unknown table kind {v:?}")))?,
            );
            continue;
        }
        if let Some(v) = header_value(line, "sbox") {
            let name: SboxName = v
                .parse()
                .map_err(|_| SboxError::asset(line_no, format!("unknown Sbox {v:?}")))?;
            rows = vec![None; 1 << name.width()];
            sbox = Some(name);
            continue;
        }
        let name = sbox.ok_or_else(|| SboxError::asset(line_no, "row before the sbox header"))?;
        let (label, body) = line
            .split_once(':')
            .ok_or_else(|| SboxError::asset(line_no, "expected `<row>: <entries>`"))?;
        let index = usize::from_str_radix(label.trim(), 16)
            .map_err(|_| SboxError::asset(line_no, format!("bad row label {label:?}")))?;
        let entries = body
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|_| SboxError::asset(line_no, format!("bad entry {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = 1 << name.width();
        if entries.len() != n {
            return Err(SboxError::asset(
                line_no,
                format!("row has {} entries, expected {n}", entries.len()),
            ));
        }
        let slot = rows
            .get_mut(index)
            .ok_or_else(|| SboxError::asset(line_no, format!("row {index:x} out of range")))?;
        if slot.replace(entries).is_some() {
            return Err(SboxError::asset(
                line_no,
                format!("row {index:x} given twice"),
            ));
        }
    }
    let kind = kind.ok_or_else(|| SboxError::asset(0, "missing `table:` header"))?;
    let name = sbox.ok_or_else(|| SboxError::asset(0, "missing `sbox:` header"))?;
    let mut entries = Vec::with_capacity(rows.len() * rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        entries.extend(row.ok_or_else(|| SboxError::asset(0, format!("row {i:x} missing")))?);
    }
    Ok((name, ConnTable::from_entries(kind, name.width(), entries)?))
}

fn parse_vars(line_no: usize, text: &str, expected: usize) -> Result<Vec<String>, SboxError> {
    let vars: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    if vars.len() != expected {
        return Err(SboxError::asset(
            line_no,
            format!("expected {expected} variables, got {}", vars.len()),
        ));
    }
    for v in &vars {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(SboxError::asset(
                line_no,
                format!("bad variable name {v:?}"),
            ));
        }
    }
    Ok(vars)
}

/// Line number, left-hand terms, right-hand constant.
type Row = (usize, Vec<(i64, String)>, i64);

/// Parses an inequality-system asset.
pub fn parse_system(text: &str) -> Result<EncodedSystem, SboxError> {
    let mut name = None;
    let mut kind = None;
    let mut sbox: Option<SboxName> = None;
    let mut input = None;
    let mut output = None;
    let mut order = None;
    let mut weight = None;
    let mut sign = None;
    let mut rows: Vec<Row> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = line.split_once(">=") {
            let terms = parse_linear(lhs).map_err(|m| SboxError::asset(line_no, m))?;
            let rhs: i64 = rhs
                .trim()
                .parse()
                .map_err(|_| SboxError::asset(line_no, format!("bad right-hand side {rhs:?}")))?;
            rows.push((line_no, terms, rhs));
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| SboxError::asset(line_no, format!("unrecognised line {line:?}")))?;
        let value = value.trim();
        let width = || {
            sbox.map(SboxName::width)
                .ok_or_else(|| SboxError::asset(line_no, "sbox must precede variables"))
        };
        match key.trim() {
            "system" => name = Some(value.to_string()),
            "table" => {
                kind = Some(value.parse::<TableKind>().map_err(|_| {
                    SboxError::asset(line_no, format!("unknown table kind {value:?}"))
                })?)
            }
            "sbox" => {
                sbox =
                    Some(value.parse().map_err(|_| {
                        SboxError::asset(line_no, format!("unknown Sbox {value:?}"))
                    })?)
            }
            "input" => input = Some(parse_vars(line_no, value, width()?)?),
            "output" => output = Some(parse_vars(line_no, value, width()?)?),
            "order" => {
                order = Some(match value {
                    "msb-first" => BitOrder::MsbFirst,
                    "lsb-first" => BitOrder::LsbFirst,
                    _ => {
                        return Err(SboxError::asset(
                            line_no,
                            format!("unknown order {value:?}"),
                        ))
                    }
                })
            }
            "weight" => {
                weight = Some(parse_linear(value).map_err(|m| SboxError::asset(line_no, m))?)
            }
            "sign" => sign = Some(parse_vars(line_no, value, 1)?.remove(0)),
            other => {
                return Err(SboxError::asset(
                    line_no,
                    format!("unknown header {other:?}"),
                ))
            }
        }
    }
    let missing = |what: &str| SboxError::asset(0, format!("missing `{what}:` header"));
    let encoding = PointEncoding::new(
        sbox.ok_or_else(|| missing("sbox"))?,
        kind.ok_or_else(|| missing("table"))?,
        input.ok_or_else(|| missing("input"))?,
        output.ok_or_else(|| missing("output"))?,
        order.ok_or_else(|| missing("order"))?,
        weight.ok_or_else(|| missing("weight"))?,
        sign,
    )
    .map_err(|m| SboxError::asset(0, m))?;
    let mut system = IneqSystem::new(encoding.variables());
    for (line_no, terms, rhs) in rows {
        system.push_terms(&terms, rhs).map_err(|e| match e {
            SboxError::Asset { message, .. } => SboxError::asset(line_no, message),
            other => other,
        })?;
    }
    Ok(EncodedSystem {
        name: name.ok_or_else(|| missing("system"))?,
        encoding,
        system,
    })
}
