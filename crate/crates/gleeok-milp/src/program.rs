use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::MilpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer { lower: i64, upper: i64 },
}

impl VarKind {
    pub fn range(self) -> (i64, i64) {
        match self {
            VarKind::Binary => (0, 1),
            VarKind::Integer { lower, upper } => (lower, upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Ge => lhs >= rhs,
            Sense::Le => lhs <= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

pub type Terms = Vec<(i64, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub name: String,
    pub terms: Terms,
    pub sense: Sense,
    pub rhs: i64,
}

/// A variable assignment, as read from a solver.
pub type Solution = BTreeMap<String, i64>;

fn eval(terms: &Terms, solution: &Solution) -> Option<i64> {
    terms
        .iter()
        .map(|(c, v)| solution.get(v).map(|x| c * x))
        .sum()
}

/// A minimization MIP over binary and bounded-integer variables.
///
/// `comments` maps a constraint index to a comment emitted just before it
/// in LP text; they mark blocks and carry no meaning for solvers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MilpProgram {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
    objective: Terms,
    comments: BTreeMap<usize, String>,
}

impl MilpProgram {
    pub fn new() -> Self {
        MilpProgram::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
    ) -> Result<(), MilpError> {
        let name = name.into();
        if let VarKind::Integer { lower, upper } = kind {
            if lower > upper {
                return Err(MilpError::EmptyRange { name, lower, upper });
            }
        }
        if self.index.contains_key(&name) {
            return Err(MilpError::DuplicateVariable(name));
        }
        self.index.insert(name.clone(), self.variables.len());
        self.variables.push(Variable { name, kind });
        Ok(())
    }

    pub fn binary(&mut self, name: impl Into<String>) -> Result<(), MilpError> {
        self.add_variable(name, VarKind::Binary)
    }

    pub fn integer(
        &mut self,
        name: impl Into<String>,
        lower: i64,
        upper: i64,
    ) -> Result<(), MilpError> {
        self.add_variable(name, VarKind::Integer { lower, upper })
    }

    pub fn constrain(
        &mut self,
        name: impl Into<String>,
        terms: Terms,
        sense: Sense,
        rhs: i64,
    ) -> Result<(), MilpError> {
        let terms = self.checked(terms)?;
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        Ok(())
    }

    pub fn comment_next(&mut self, text: impl Into<String>) {
        self.comments.insert(self.constraints.len(), text.into());
    }

    pub fn set_objective(&mut self, terms: Terms) -> Result<(), MilpError> {
        self.objective = self.checked(terms)?;
        Ok(())
    }

    /// Drops zero coefficients and rejects undeclared variables.
    fn checked(&self, terms: Terms) -> Result<Terms, MilpError> {
        if let Some((_, v)) = terms.iter().find(|(_, v)| !self.index.contains_key(v)) {
            return Err(MilpError::Undeclared(v.clone()));
        }
        Ok(terms.into_iter().filter(|(c, _)| *c != 0).collect())
    }

    /// Replaces any earlier pin with `objective = value`.
    pub fn pin_objective(&mut self, value: i64) {
        self.constraints.retain(|c| c.name != PIN_NAME);
        self.constraints.push(Constraint {
            name: PIN_NAME.into(),
            terms: self.objective.clone(),
            sense: Sense::Eq,
            rhs: value,
        });
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.index.get(name).map(|&i| &self.variables[i])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Terms {
        &self.objective
    }

    pub fn comments(&self) -> &BTreeMap<usize, String> {
        &self.comments
    }

    /// Checks that every referenced variable is declared.
    pub fn validate(&self) -> Result<(), MilpError> {
        let referenced = self
            .constraints
            .iter()
            .flat_map(|c| &c.terms)
            .chain(&self.objective);
        for (_, v) in referenced {
            if !self.index.contains_key(v) {
                return Err(MilpError::Undeclared(v.clone()));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, solution: &Solution) -> Option<i64> {
        eval(&self.objective, solution)
    }

    /// Constraints the assignment violates or leaves unassigned, by name.
    pub fn violations(&self, solution: &Solution) -> Vec<&str> {
        let mut out = Vec::new();
        for v in &self.variables {
            let (lo, hi) = v.kind.range();
            match solution.get(&v.name) {
                Some(&x) if (lo..=hi).contains(&x) => {}
                _ => out.push(v.name.as_str()),
            }
        }
        for c in &self.constraints {
            if !eval(&c.terms, solution).is_some_and(|lhs| c.sense.holds(lhs, c.rhs)) {
                out.push(c.name.as_str());
            }
        }
        out
    }

    pub fn is_feasible(&self, solution: &Solution) -> bool {
        self.violations(solution).is_empty()
    }
}

pub const PIN_NAME: &str = "pin_objective";

impl fmt::Display for MilpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} variables, {} constraints",
            self.variables.len(),
            self.constraints.len()
        )
    }
}
