//! Solver output: `name value` lines, one block per solution, blocks
//! separated by blank lines. Lines starting with `#` are comments; the
//! comment `# truncated` marks an enumeration cut short by its cap.

use std::fmt::Write as _;

use crate::error::MilpError;
use crate::program::Solution;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub truncated: bool,
}

fn solution_error(line: usize, message: impl Into<String>) -> MilpError {
    MilpError::Solution {
        line,
        message: message.into(),
    }
}

/// Values must be integral up to `1e-6`; solvers print `1.0` or `0.9999999`.
fn parse_value(text: &str, line: usize) -> Result<i64, MilpError> {
    if let Ok(v) = text.parse::<i64>() {
        return Ok(v);
    }
    let f: f64 = text
        .parse()
        .map_err(|_| solution_error(line, format!("bad value `{text}`")))?;
    let r = f.round();
    if !f.is_finite() || (f - r).abs() > 1e-6 || r.abs() > 9.0e15 {
        return Err(solution_error(line, format!("non-integral value `{text}`")));
    }
    Ok(r as i64)
}

pub fn parse_solutions(text: &str) -> Result<SolutionSet, MilpError> {
    let mut set = SolutionSet::default();
    let mut current = Solution::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if comment.trim() == "truncated" {
                set.truncated = true;
            }
            continue;
        }
        if trimmed.is_empty() {
            if !current.is_empty() {
                set.solutions.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(solution_error(
                line,
                format!("expected `name value`, got `{trimmed}`"),
            ));
        };
        if current
            .insert(name.to_string(), parse_value(value, line)?)
            .is_some()
        {
            return Err(solution_error(
                line,
                format!("`{name}` assigned twice in one solution"),
            ));
        }
    }
    if !current.is_empty() {
        set.solutions.push(current);
    }
    Ok(set)
}

pub fn write_solutions(set: &SolutionSet) -> String {
    let mut out = String::new();
    if set.truncated {
        out.push_str("# truncated\n");
    }
    for (k, s) in set.solutions.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for (name, value) in s {
            let _ = writeln!(out, "{name} {value}");
        }
    }
    out
}
