//! LP text in the CPLEX dialect: `Minimize`, `Subject To`, `Bounds`,
//! `Binary`, `Generals`, `End`.
//!
//! Every variable gets a line in `Bounds` in declaration order, so reading
//! the text back restores the program exactly. Comment lines (`\`) inside
//! `Subject To` are kept and attached to the next constraint.

use std::fmt::Write as _;

use crate::error::MilpError;
use crate::program::{MilpProgram, Sense, Terms, VarKind};

const WRAP: usize = 200;

fn render_terms(terms: &Terms, fallback: &str) -> String {
    if terms.is_empty() {
        return format!("0 {fallback}");
    }
    let mut out = String::new();
    for (k, (c, v)) in terms.iter().enumerate() {
        let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
        if k > 0 {
            out.push(' ');
            out.push_str(sign);
            out.push(' ');
        } else if sign == "-" {
            out.push_str("- ");
        }
        if mag != 1 {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(v);
    }
    out
}

fn push_wrapped(out: &mut String, line: &str) {
    let mut width = 0;
    for (k, token) in line.split(' ').enumerate() {
        if k > 0 {
            if width + token.len() + 1 > WRAP {
                out.push_str("\n   ");
                width = 3;
            } else {
                out.push(' ');
                width += 1;
            }
        }
        out.push_str(token);
        width += token.len();
    }
    out.push('\n');
}

pub fn write_lp(program: &MilpProgram) -> String {
    let fallback = program.variables().first().map_or("x", |v| v.name.as_str());
    let mut out = String::from("Minimize\n");
    push_wrapped(
        &mut out,
        &format!(" obj: {}", render_terms(program.objective(), fallback)),
    );
    out.push_str("Subject To\n");
    for (k, c) in program.constraints().iter().enumerate() {
        if let Some(text) = program.comments().get(&k) {
            let _ = writeln!(out, "\\ {text}");
        }
        let line = format!(
            " {}: {} {} {}",
            c.name,
            render_terms(&c.terms, fallback),
            c.sense.symbol(),
            c.rhs
        );
        push_wrapped(&mut out, &line);
    }
    out.push_str("Bounds\n");
    for v in program.variables() {
        let (lo, hi) = v.kind.range();
        let _ = writeln!(out, " {lo} <= {} <= {hi}", v.name);
    }
    for (title, binary) in [("Binary", true), ("Generals", false)] {
        let names: Vec<&str> = program
            .variables()
            .iter()
            .filter(|v| matches!(v.kind, VarKind::Binary) == binary)
            .map(|v| v.name.as_str())
            .collect();
        if !names.is_empty() {
            let _ = writeln!(out, "{title}");
            push_wrapped(&mut out, &format!(" {}", names.join(" ")));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    Generals,
    End,
}

fn section_header(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "generals" | "general" | "gen" => Some(Section::Generals),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn lp_error(line: usize, message: impl Into<String>) -> MilpError {
    MilpError::Lp {
        line,
        message: message.into(),
    }
}

fn parse_sense(token: &str) -> Option<Sense> {
    match token {
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "<=" | "=<" | "<" => Some(Sense::Le),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || "_!\"#$%&()/,;?@`'{}|~".contains(c))
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_!\"#$%&()/,.;?@`'{}|~[]".contains(c))
}

/// Splits `name:` and sign characters glued to their neighbours.
fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let mut cur = String::new();
        let mut chars = raw.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                ':' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    out.push(":".into());
                }
                '<' | '>' | '=' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    let mut op = c.to_string();
                    if let Some(&n) = chars.peek() {
                        if "<>=".contains(n) {
                            op.push(n);
                            chars.next();
                        }
                    }
                    out.push(op);
                }
                '+' | '-' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    out.push(c.to_string());
                }
                _ => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    // A sign opening an expression belongs to the number after it.
    let mut merged: Vec<String> = Vec::with_capacity(out.len());
    let mut i = 0;
    while i < out.len() {
        let opens = merged
            .last()
            .is_none_or(|p: &String| p == ":" || parse_sense(p).is_some());
        if (out[i] == "-" || out[i] == "+")
            && opens
            && out.get(i + 1).is_some_and(|n| n.parse::<f64>().is_ok())
        {
            merged.push(format!("{}{}", out[i], out[i + 1]));
            i += 2;
        } else {
            merged.push(out[i].clone());
            i += 1;
        }
    }
    merged
}

fn parse_int(token: &str, line: usize) -> Result<i64, MilpError> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(v);
    }
    let f: f64 = token
        .parse()
        .map_err(|_| lp_error(line, format!("expected a number, got `{token}`")))?;
    if f.fract() != 0.0 || f.abs() > 9.0e15 {
        return Err(lp_error(line, format!("non-integer coefficient `{token}`")));
    }
    Ok(f as i64)
}

/// `[sign] [coef] name` sequence until a sense token or the end.
fn parse_terms(toks: &[String], line: usize) -> Result<(Terms, usize), MilpError> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() && parse_sense(&toks[i]).is_none() {
        let mut sign = 1;
        while toks[i] == "+" || toks[i] == "-" {
            if toks[i] == "-" {
                sign = -sign;
            }
            i += 1;
            if i == toks.len() {
                return Err(lp_error(line, "dangling sign"));
            }
        }
        let mut coef = 1;
        if toks[i].parse::<f64>().is_ok() {
            coef = parse_int(&toks[i], line)?;
            i += 1;
            if i == toks.len()
                || parse_sense(&toks[i]).is_some()
                || toks[i] == "+"
                || toks[i] == "-"
            {
                if coef == 0 {
                    continue;
                }
                return Err(lp_error(
                    line,
                    "constants on the left-hand side are not supported",
                ));
            }
        }
        let name = &toks[i];
        if !valid_name(name) {
            return Err(lp_error(line, format!("invalid variable name `{name}`")));
        }
        if sign * coef != 0 {
            terms.push((sign * coef, name.clone()));
        }
        i += 1;
    }
    Ok((terms, i))
}

/// Parses LP text written by [`write_lp`] (and the common subset of the
/// dialect other tools emit for pure integer programs).
pub fn read_lp(text: &str) -> Result<MilpProgram, MilpError> {
    let mut section = Section::Preamble;
    let mut objective_text = String::new();
    let mut objective_line = 0;
    // (first line, text, preceding comment)
    let mut rows: Vec<(usize, String, Option<String>)> = Vec::new();
    let mut pending_comment: Option<String> = None;
    let mut bounds: Vec<(usize, String)> = Vec::new();
    let mut binaries: Vec<(usize, String)> = Vec::new();
    let mut generals: Vec<(usize, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('\\') {
            if section == Section::Constraints {
                pending_comment = Some(comment.trim().to_string());
            }
            continue;
        }
        if let Some(s) = section_header(trimmed) {
            if s == Section::Objective && section != Section::Preamble {
                return Err(lp_error(line, "objective section appears twice"));
            }
            section = s;
            if s == Section::Objective {
                objective_line = line;
            }
            continue;
        }
        let continuation = raw.starts_with("   ") && !raw.trim_start().contains(':');
        match section {
            Section::Preamble => return Err(lp_error(line, "text before the objective section")),
            Section::End => return Err(lp_error(line, "text after End")),
            Section::Objective => {
                objective_text.push(' ');
                objective_text.push_str(trimmed);
            }
            Section::Constraints => match rows.last_mut() {
                Some(last) if continuation => {
                    last.1.push(' ');
                    last.1.push_str(trimmed);
                }
                _ => rows.push((line, trimmed.to_string(), pending_comment.take())),
            },
            Section::Bounds => bounds.push((line, trimmed.to_string())),
            Section::Binary => {
                binaries.extend(trimmed.split_whitespace().map(|t| (line, t.to_string())))
            }
            Section::Generals => {
                generals.extend(trimmed.split_whitespace().map(|t| (line, t.to_string())))
            }
        }
    }
    if section != Section::End {
        return Err(lp_error(text.lines().count(), "missing End"));
    }

    // Declarations: bounds in order, then kinds.
    let mut declared: Vec<(String, i64, i64)> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (line, b) in &bounds {
        let toks = tokens(b);
        let (name, lo, hi) = match toks.as_slice() {
            [lo, s1, name, s2, hi]
                if parse_sense(s1) == Some(Sense::Le) && parse_sense(s2) == Some(Sense::Le) =>
            {
                (name.clone(), parse_int(lo, *line)?, parse_int(hi, *line)?)
            }
            [name, s, v] if parse_sense(s) == Some(Sense::Eq) => {
                let v = parse_int(v, *line)?;
                (name.clone(), v, v)
            }
            [name, s, v] if parse_sense(s) == Some(Sense::Le) => {
                (name.clone(), 0, parse_int(v, *line)?)
            }
            _ => return Err(lp_error(*line, format!("unsupported bound `{b}`"))),
        };
        if !valid_name(&name) {
            return Err(lp_error(*line, format!("invalid variable name `{name}`")));
        }
        if seen.insert(name.clone(), declared.len()).is_some() {
            return Err(lp_error(*line, format!("bound for `{name}` given twice")));
        }
        declared.push((name, lo, hi));
    }
    let mut kinds: std::collections::HashMap<String, bool> = std::collections::HashMap::new();
    for (list, binary) in [(&binaries, true), (&generals, false)] {
        for (line, name) in list {
            if kinds.insert(name.clone(), binary).is_some() {
                return Err(lp_error(*line, format!("`{name}` declared integer twice")));
            }
            if !seen.contains_key(name) {
                seen.insert(name.clone(), declared.len());
                declared.push((name.clone(), 0, if binary { 1 } else { i64::MAX }));
            }
        }
    }
    let mut program = MilpProgram::new();
    for (name, lo, hi) in declared {
        let kind = match kinds.get(&name) {
            Some(true) => {
                if (lo, hi) != (0, 1) {
                    return Err(lp_error(
                        0,
                        format!("binary `{name}` has bounds {lo}..{hi}"),
                    ));
                }
                VarKind::Binary
            }
            Some(false) => VarKind::Integer {
                lower: lo,
                upper: hi,
            },
            None => {
                return Err(lp_error(
                    0,
                    format!("`{name}` is continuous; only integer programs are supported"),
                ))
            }
        };
        program.add_variable(name, kind)?;
    }

    let toks = tokens(&objective_text);
    let body = match toks.as_slice() {
        [name, colon, rest @ ..] if colon == ":" && valid_name(name) => rest,
        rest => rest,
    };
    let (objective, used) = parse_terms(body, objective_line)?;
    if used != body.len() {
        return Err(lp_error(
            objective_line,
            "relational operator in the objective",
        ));
    }
    program
        .set_objective(objective)
        .map_err(|e| lp_error(objective_line, e.to_string()))?;

    for (k, (line, row, comment)) in rows.into_iter().enumerate() {
        let toks = tokens(&row);
        let (name, body) = match toks.as_slice() {
            [name, colon, rest @ ..] if colon == ":" => (name.clone(), rest),
            rest => (format!("c{}", k + 1), rest),
        };
        let (terms, used) = parse_terms(body, line)?;
        let rest = &body[used..];
        let (sense, rhs) = match rest {
            [s, v] => (
                parse_sense(s).ok_or_else(|| lp_error(line, "expected a relation"))?,
                parse_int(v, line)?,
            ),
            _ => return Err(lp_error(line, format!("malformed constraint `{row}`"))),
        };
        if let Some(c) = comment {
            program.comment_next(c);
        }
        program
            .constrain(name, terms, sense, rhs)
            .map_err(|e| lp_error(line, e.to_string()))?;
    }
    Ok(program)
}
