use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};

pub const CONVENTIONS: &str = include_str!("../../../docs/conventions.md");

pub fn conventions_digest() -> String {
    let digest = Sha256::digest(CONVENTIONS.as_bytes());
    digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn and(self, other: Status) -> Status {
        Status::from_pass(self == Status::Pass && other == Status::Pass)
    }
}

/// Header with the effective settings, data lines, then a status line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub settings: Vec<(String, String)>,
    pub lines: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            settings: Vec::new(),
            lines: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn setting(&mut self, key: &str, value: impl fmt::Display) {
        self.settings.push((key.into(), value.to_string()));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    /// Adds every line of a multi-line block.
    pub fn block(&mut self, text: impl fmt::Display) {
        self.lines
            .extend(text.to_string().lines().map(String::from));
    }

    /// Records a check; any failure fails the report.
    pub fn check(&mut self, name: &str, pass: bool, detail: impl fmt::Display) {
        self.line(format!(
            "check {name} {} {detail}",
            if pass { "pass" } else { "FAIL" }
        ));
        self.status = self.status.and(Status::from_pass(pass));
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# gleeok-workbench {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(f, "# conventions sha256:{}", conventions_digest())?;
        writeln!(f, "# command {}", self.command)?;
        for (k, v) in &self.settings {
            writeln!(f, "# config {k} = {v}")?;
        }
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        write!(
            f,
            "status {}",
            if self.status == Status::Pass {
                "pass"
            } else {
                "fail"
            }
        )
    }
}
