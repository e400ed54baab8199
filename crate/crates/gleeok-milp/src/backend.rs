use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::MilpError;
use crate::lp::write_lp;
use crate::program::{MilpProgram, Solution};
use crate::solution::{parse_solutions, SolutionSet};

/// Environment variable naming the external solver adapter.
pub const SOLVER_ENV: &str = "GLEEOK_SOLVER";
pub const DEFAULT_POOL_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: i64, solution: Solution },
    Infeasible,
}

pub trait MilpBackend {
    fn name(&self) -> String;

    fn optimize(&self, program: &MilpProgram) -> Result<Optimum, MilpError>;

    /// Feasible solutions, at most `cap` of them.
    fn enumerate(&self, program: &MilpProgram, cap: usize) -> Result<SolutionSet, MilpError>;
}

/// Exhaustive search for programs with a few dozen variables.
///
/// Variables are assigned in declaration order and each constraint is
/// checked as soon as its last variable is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceBackend {
    pub max_log2: u32,
}

impl Default for BruteForceBackend {
    fn default() -> Self {
        BruteForceBackend { max_log2: 32 }
    }
}

struct Search<'a> {
    program: &'a MilpProgram,
    ranges: Vec<(i64, i64)>,
    /// Constraints, as `(coeff, var index)` lists, grouped by their last variable.
    due: Vec<Vec<usize>>,
    compiled: Vec<Vec<(i64, usize)>>,
    values: Vec<i64>,
}

impl<'a> Search<'a> {
    fn new(program: &'a MilpProgram, max_log2: u32) -> Result<Self, MilpError> {
        program.validate()?;
        let vars = program.variables();
        let index: std::collections::HashMap<&str, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let ranges: Vec<(i64, i64)> = vars.iter().map(|v| v.kind.range()).collect();
        let log2: f64 = ranges
            .iter()
            .map(|&(lo, hi)| ((hi - lo + 1).max(1) as f64).log2())
            .sum();
        if log2 > max_log2 as f64 {
            return Err(MilpError::TooLarge {
                log2: log2.ceil() as u32,
            });
        }
        let mut due = vec![Vec::new(); vars.len() + 1];
        let mut compiled = Vec::new();
        for (k, c) in program.constraints().iter().enumerate() {
            let terms: Vec<(i64, usize)> = c
                .terms
                .iter()
                .map(|(a, v)| (*a, index[v.as_str()]))
                .collect();
            let last = terms.iter().map(|&(_, i)| i + 1).max().unwrap_or(0);
            due[last].push(k);
            compiled.push(terms);
        }
        Ok(Search {
            program,
            ranges,
            due,
            compiled,
            values: vec![0; vars.len()],
        })
    }

    fn checks_pass(&self, depth: usize) -> bool {
        self.due[depth].iter().all(|&k| {
            let c = &self.program.constraints()[k];
            let lhs: i64 = self.compiled[k]
                .iter()
                .map(|&(a, i)| a * self.values[i])
                .sum();
            c.sense.holds(lhs, c.rhs)
        })
    }

    fn solution(&self) -> Solution {
        self.program
            .variables()
            .iter()
            .zip(&self.values)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }

    /// Calls `visit` on every feasible assignment until it returns `false`.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&Self) -> bool) -> bool {
        if !self.checks_pass(depth) {
            return true;
        }
        if depth == self.values.len() {
            return visit(self);
        }
        let (lo, hi) = self.ranges[depth];
        for x in lo..=hi {
            self.values[depth] = x;
            if !self.run(depth + 1, visit) {
                return false;
            }
        }
        true
    }
}

impl MilpBackend for BruteForceBackend {
    fn name(&self) -> String {
        "brute-force".into()
    }

    fn optimize(&self, program: &MilpProgram) -> Result<Optimum, MilpError> {
        let mut search = Search::new(program, self.max_log2)?;
        let mut best: Option<(i64, Solution)> = None;
        search.run(0, &mut |s| {
            let sol = s.solution();
            let value = program.objective_value(&sol).unwrap_or(0);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, sol));
            }
            true
        });
        Ok(match best {
            Some((value, solution)) => Optimum::Optimal { value, solution },
            None => Optimum::Infeasible,
        })
    }

    fn enumerate(&self, program: &MilpProgram, cap: usize) -> Result<SolutionSet, MilpError> {
        let mut search = Search::new(program, self.max_log2)?;
        let mut set = SolutionSet::default();
        search.run(0, &mut |s| {
            if set.solutions.len() == cap {
                set.truncated = true;
                return false;
            }
            set.solutions.push(s.solution());
            true
        });
        Ok(set)
    }
}

/// An external MILP solver driven through a small command protocol.
///
/// The adapter is run as
/// `<command...> optimize <model.lp> <solutions>` or
/// `<command...> enumerate <model.lp> <solutions> <cap>`.
/// It writes solutions in the `name value` format and exits with 0 on
/// success, 2 if the model is infeasible, and anything else on error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverAdapter {
    pub command: Vec<String>,
}

static RUN_COUNTER: AtomicUsize = AtomicUsize::new(0);

impl SolverAdapter {
    pub fn new(command: Vec<String>) -> Result<Self, MilpError> {
        if command.is_empty() {
            return Err(MilpError::SolverUnavailable("empty solver command".into()));
        }
        Ok(SolverAdapter { command })
    }

    /// Reads a whitespace-separated command from the solver variable.
    pub fn from_env() -> Result<Self, MilpError> {
        let raw = std::env::var(SOLVER_ENV)
            .map_err(|_| MilpError::SolverUnavailable(format!("{SOLVER_ENV} is not set")))?;
        Self::new(raw.split_whitespace().map(String::from).collect())
    }

    fn scratch(&self) -> Result<PathBuf, MilpError> {
        let n = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
        let dir = std::env::temp_dir().join(format!("gleeok-milp-{}-{n}", std::process::id()));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn invoke(
        &self,
        program: &MilpProgram,
        mode: &str,
        cap: Option<usize>,
    ) -> Result<Option<SolutionSet>, MilpError> {
        let dir = self.scratch()?;
        let result = self.invoke_in(&dir, program, mode, cap);
        let _ = std::fs::remove_dir_all(&dir);
        result
    }

    fn invoke_in(
        &self,
        dir: &std::path::Path,
        program: &MilpProgram,
        mode: &str,
        cap: Option<usize>,
    ) -> Result<Option<SolutionSet>, MilpError> {
        let lp = dir.join("model.lp");
        let out = dir.join("solutions.txt");
        std::fs::write(&lp, write_lp(program))?;
        let mut cmd = Command::new(&self.command[0]);
        cmd.args(&self.command[1..]).arg(mode).arg(&lp).arg(&out);
        if let Some(cap) = cap {
            cmd.arg(cap.to_string());
        }
        let output = cmd.output().map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                MilpError::SolverUnavailable(format!("`{}` not found", self.command[0]))
            }
            _ => MilpError::Io(e.to_string()),
        })?;
        match output.status.code() {
            Some(0) => Ok(Some(parse_solutions(&std::fs::read_to_string(&out)?)?)),
            Some(2) => Ok(None),
            status => Err(MilpError::SolverFailed {
                status,
                message: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            }),
        }
    }
}

impl MilpBackend for SolverAdapter {
    fn name(&self) -> String {
        self.command.join(" ")
    }

    fn optimize(&self, program: &MilpProgram) -> Result<Optimum, MilpError> {
        let Some(set) = self.invoke(program, "optimize", None)? else {
            return Ok(Optimum::Infeasible);
        };
        let solution = set
            .solutions
            .into_iter()
            .next()
            .ok_or_else(|| MilpError::SolverFailed {
                status: Some(0),
                message: "reported success without a solution".into(),
            })?;
        let violated = program.violations(&solution);
        if let Some(name) = violated.first() {
            return Err(MilpError::SolverFailed {
                status: Some(0),
                message: format!("returned solution violates `{name}`"),
            });
        }
        let value = program.objective_value(&solution).unwrap_or(0);
        Ok(Optimum::Optimal { value, solution })
    }

    fn enumerate(&self, program: &MilpProgram, cap: usize) -> Result<SolutionSet, MilpError> {
        let set = self
            .invoke(program, "enumerate", Some(cap))?
            .unwrap_or_default();
        if let Some(bad) = set.solutions.iter().find(|s| !program.is_feasible(s)) {
            let name = program
                .violations(bad)
                .first()
                .map(|s| s.to_string())
                .unwrap_or_default();
            return Err(MilpError::SolverFailed {
                status: Some(0),
                message: format!("returned solution violates `{name}`"),
            });
        }
        Ok(set)
    }
}
