//! Versioned one-line JSON reports.
//!
//! Layout, in key order: `schema`, `tool`, `command`, `config`, `result`,
//! `checks`, `status`, `timing`. Everything except `timing` is a function of
//! the command line and seed.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "nilgeo-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
    #[serde(rename = "ERROR")]
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Tolerance the check was judged against, if numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self {
            name: name.into(),
            status,
            tolerance: None,
            value: None,
            witness: None,
        }
    }

    pub fn pass_if(name: impl Into<String>, passed: bool) -> Self {
        Self::new(name, if passed { Status::Pass } else { Status::Fail })
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn value(mut self, v: impl Serialize) -> Self {
        self.value = Some(serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(w).unwrap_or(Value::Null));
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: String,
    pub command: String,
    pub config: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    pub status: Status,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            tool: format!("nilgeo {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            config,
            result: Value::Null,
            checks: Vec::new(),
            status: Status::Pass,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn result(mut self, v: impl Serialize) -> Self {
        self.result = serde_json::to_value(v).unwrap_or(Value::Null);
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// FAIL or ERROR if any check is; otherwise PASS.
    pub fn overall(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Error) {
            Status::Error
        } else if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.overall() {
            Status::Pass | Status::NotApplicable => 0,
            Status::Fail | Status::Error => 1,
        }
    }

    pub fn finish(mut self, elapsed_ms: f64) -> Self {
        self.status = self.overall();
        self.timing.elapsed_ms = elapsed_ms;
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Drops the `timing` field of a report line, for comparing runs.
pub fn strip_timing(line: &str) -> Option<String> {
    let mut v: Value = serde_json::from_str(line).ok()?;
    v.as_object_mut()?.remove("timing");
    Some(v.to_string())
}
