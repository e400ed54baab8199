use std::fmt;

use crate::error::SboxError;

/// Largest variable count accepted by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 16;

/// `sum(coeffs[i] * v_i) >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl Inequality {
    pub fn holds(&self, point: &[u8]) -> bool {
        let lhs: i64 = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(&c, &v)| c * v as i64)
            .sum();
        lhs >= self.rhs
    }
}

/// Integer inequalities over named 0/1 variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IneqSystem {
    vars: Vec<String>,
    rows: Vec<Inequality>,
}

impl IneqSystem {
    pub fn new(vars: Vec<String>) -> Self {
        IneqSystem {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn push(&mut self, row: Inequality) -> Result<(), SboxError> {
        if row.coeffs.len() != self.vars.len() {
            return Err(SboxError::ArityMismatch {
                expected: self.vars.len(),
                got: row.coeffs.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds a row given as `(coefficient, variable)` terms.
    pub fn push_terms(&mut self, terms: &[(i64, String)], rhs: i64) -> Result<(), SboxError> {
        let mut coeffs = vec![0i64; self.vars.len()];
        for (c, name) in terms {
            let i = self
                .var_index(name)
                .ok_or_else(|| SboxError::asset(0, format!("undeclared variable {name:?}")))?;
            coeffs[i] += c;
        }
        self.push(Inequality { coeffs, rhs })
    }

    pub fn is_satisfied(&self, point: &[u8]) -> bool {
        self.rows.iter().all(|r| r.holds(point))
    }

    /// Copy with row `index` dropped.
    pub fn without_row(&self, index: usize) -> Self {
        let mut rows = self.rows.clone();
        rows.remove(index);
        IneqSystem {
            vars: self.vars.clone(),
            rows,
        }
    }

    pub fn render_row(&self, row: &Inequality) -> String {
        let mut out = String::new();
        for (c, v) in row.coeffs.iter().zip(&self.vars) {
            if *c == 0 {
                continue;
            }
            let mag = c.abs();
            let term = if mag == 1 {
                v.clone()
            } else {
                format!("{mag} {v}")
            };
            if out.is_empty() {
                out = if *c < 0 { format!("-{term}") } else { term };
            } else {
                out += &format!(" {} {term}", if *c < 0 { '-' } else { '+' });
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} >= {}", row.rhs)
    }
}

impl fmt::Display for IneqSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{}", self.render_row(row))?;
        }
        Ok(())
    }
}

/// Every 0/1 assignment satisfying all rows, in increasing binary order
/// (first variable most significant).
pub fn feasible_points(system: &IneqSystem) -> Result<Vec<Vec<u8>>, SboxError> {
    let vars = system.vars().len();
    if vars > ENUMERATION_LIMIT {
        return Err(SboxError::TooManyVariables {
            vars,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut point = vec![0u8; vars];
    for code in 0u32..(1 << vars) {
        for (i, slot) in point.iter_mut().enumerate() {
            *slot = ((code >> (vars - 1 - i)) & 1) as u8;
        }
        if system.is_satisfied(&point) {
            out.push(point.clone());
        }
    }
    Ok(out)
}

/// The inequality `sum((-1)^d_i v_i) + sum(d_i) >= 1`, violated only by `point`.
pub fn cutting_off_inequality(point: &[u8]) -> Inequality {
    let ones: i64 = point.iter().map(|&d| d as i64).sum();
    Inequality {
        coeffs: point.iter().map(|&d| if d == 1 { -1 } else { 1 }).collect(),
        rhs: 1 - ones,
    }
}

/// Parses a linear form such as `2 p0 + 3 p1 - x2` or `0`.
pub fn parse_linear(text: &str) -> Result<Vec<(i64, String)>, String> {
    let mut terms = Vec::new();
    let compact: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut rest = compact.trim();
    if rest == "0" {
        return Ok(terms);
    }
    if rest.is_empty() {
        return Err("empty expression".into());
    }
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('+') {
            if first {
                return Err("leading '+'".into());
            }
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        } else if !first {
            return Err(format!("expected '+' or '-' before {rest:?}"));
        }
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        let coeff = if digits > 0 {
            let c: i64 = rest[..digits]
                .parse()
                .map_err(|_| format!("coefficient too large in {rest:?}"))?;
            rest = rest[digits..].trim_start();
            c
        } else {
            1
        };
        let name_len = rest
            .char_indices()
            .take_while(|&(i, c)| {
                if i == 0 {
                    c.is_ascii_alphabetic()
                } else {
                    c.is_ascii_alphanumeric() || c == '_'
                }
            })
            .count();
        if name_len == 0 {
            return Err(format!("expected a variable at {rest:?}"));
        }
        terms.push((sign * coeff, rest[..name_len].to_string()));
        rest = rest[name_len..].trim_start();
        first = false;
    }
    Ok(terms)
}
