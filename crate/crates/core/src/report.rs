//! Named pass/fail checks and the report every CLI command emits.

use std::fmt::Display;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), expected: expected.into(), actual: actual.into(), pass }
    }

    /// Passes iff `expected == actual`.
    pub fn equal<T: PartialEq + Display>(name: impl Into<String>, expected: T, actual: T) -> Self {
        let pass = expected == actual;
        Check::new(name, expected.to_string(), actual.to_string(), pass)
    }

    pub fn holds(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check::new(name, "holds", detail, pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::BudgetExceeded => 3,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    pub checks: Vec<Check>,
    /// Work items dropped because they exceeded the budget.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Failures take precedence over skipped work.
    pub fn status(&self) -> Status {
        if self.failures().next().is_some() {
            Status::Fail
        } else if !self.skipped.is_empty() {
            Status::BudgetExceeded
        } else {
            Status::Pass
        }
    }

    /// One `PASS`/`FAIL` line per check, then skipped items.
    pub fn check_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                if c.pass {
                    format!("PASS {}", c.name)
                } else {
                    format!("FAIL {}: expected {}, got {}", c.name, c.expected, c.actual)
                }
            })
            .collect();
        out.extend(self.skipped.iter().map(|s| format!("SKIP {s}")));
        out
    }
}
