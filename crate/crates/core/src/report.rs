//! JSON-lines check records shared by the verification suite and the CLI.

use std::io::Write;

use serde::Serialize;

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub criterion: u32,
    pub check: String,
    /// The mathematical statement the check exercises.
    pub anchor: String,
    pub model: Option<String>,
    pub grid: Option<String>,
    pub relation: Relation,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
    pub seed: u64,
    /// Error text when the check could not be evaluated.
    pub error: Option<String>,
    /// Set when the error was numerical (exit code 3) rather than a failed comparison.
    pub numerical_error: bool,
}

impl CheckRecord {
    pub fn new(criterion: u32, check: impl Into<String>, anchor: impl Into<String>, seed: u64) -> Self {
        CheckRecord {
            criterion,
            check: check.into(),
            anchor: anchor.into(),
            model: None,
            grid: None,
            relation: Relation::AtMost,
            tolerance: 0.0,
            observed: f64::NAN,
            pass: false,
            seed,
            error: None,
            numerical_error: false,
        }
    }

    pub fn model(mut self, name: &str) -> Self {
        self.model = Some(name.to_string());
        self
    }

    pub fn grid(mut self, sizes: &[usize]) -> Self {
        self.grid = Some(sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"));
        self
    }

    /// observed ≤ tolerance.
    pub fn at_most(mut self, observed: f64, tolerance: f64) -> Self {
        self.relation = Relation::AtMost;
        self.tolerance = tolerance;
        self.observed = observed;
        self.pass = observed <= tolerance;
        self
    }

    /// observed ≥ tolerance.
    pub fn at_least(mut self, observed: f64, tolerance: f64) -> Self {
        self.relation = Relation::AtLeast;
        self.tolerance = tolerance;
        self.observed = observed;
        self.pass = observed >= tolerance;
        self
    }

    /// Boolean checks: observed is 1 for true, 0 for false.
    pub fn holds(self, ok: bool) -> Self {
        self.at_least(if ok { 1.0 } else { 0.0 }, 1.0)
    }

    /// Marks the check failed with the error that prevented it.
    pub fn failed(mut self, err: &crate::Error) -> Self {
        self.pass = false;
        self.error = Some(err.to_string());
        self.numerical_error = err.is_numerical();
        self
    }

    /// Unwraps a computed record, or marks this one failed with the error.
    pub fn from_result(self, r: Result<CheckRecord>) -> CheckRecord {
        match r {
            Ok(rec) => rec,
            Err(e) => self.failed(&e),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

pub fn write_jsonl<W: Write>(records: &[CheckRecord], mut w: W) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.to_json_line())?;
    }
    Ok(())
}
