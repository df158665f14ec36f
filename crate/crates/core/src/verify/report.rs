//! Check results and suite reports.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::heisenberg::ModelConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Exact,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub kind: CheckKind,
    /// Exact checks: a rational magnitude, `"0"` on pass. Empirical checks: a float.
    pub error: Option<String>,
    pub witness: Option<Value>,
    pub ms: u64,
    /// What was covered, or why the check was skipped.
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, kind: CheckKind, passed: bool) -> Self {
        CheckResult {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            kind,
            error: None,
            witness: None,
            ms: 0,
            detail: None,
        }
    }

    pub fn skipped(name: impl Into<String>, kind: CheckKind, reason: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Skipped,
            kind,
            error: None,
            witness: None,
            ms: 0,
            detail: Some(reason.into()),
        }
    }

    pub fn with_error(mut self, error: impl Into<String>) -> Self {
        self.error = Some(error.into());
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub p: u64,
    pub i0: i64,
    pub j0: i64,
    #[serde(rename = "I")]
    pub i_max: i64,
    #[serde(rename = "J")]
    pub j_max: i64,
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    #[serde(rename = "C")]
    pub c: i64,
}

impl From<&ModelConfig> for ConfigEcho {
    fn from(c: &ModelConfig) -> Self {
        ConfigEcho { p: c.p, i0: c.i0, j0: c.j0, i_max: c.i_max, j_max: c.j_max, a: c.a, b: c.b, c: c.c }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl SuiteReport {
    /// Sorts the checks by name and recomputes the summary.
    pub fn new(suite: impl Into<String>, config: &ModelConfig, seed: u64, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        SuiteReport { suite: suite.into(), config: config.into(), seed, checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per check: `name,status,kind,error,witness,ms,detail`; the witness is embedded JSON.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "status", "kind", "error", "witness", "ms", "detail"])?;
        for c in &self.checks {
            let status = serde_json::to_value(c.status)?;
            let kind = serde_json::to_value(c.kind)?;
            w.write_record([
                c.name.as_str(),
                status.as_str().unwrap_or_default(),
                kind.as_str().unwrap_or_default(),
                c.error.as_deref().unwrap_or(""),
                &c.witness.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                &c.ms.to_string(),
                c.detail.as_deref().unwrap_or(""),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_sorts_and_counts() {
        let cfg = ModelConfig::new(2, 0, 0, 1, 1);
        let checks = vec![
            CheckResult::new("b", CheckKind::Exact, true).with_error("0"),
            CheckResult::new("a", CheckKind::Exact, false).with_witness(serde_json::json!({"atom": 3})),
            CheckResult::skipped("c", CheckKind::Empirical, "grid too small"),
        ];
        let r = SuiteReport::new("x", &cfg, 5, checks);
        assert_eq!(r.checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(r.summary, Summary { pass: 1, fail: 1, skipped: 1 });
        assert!(!r.all_passed());
        let json: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["config"]["I"], 1);
        assert_eq!(json["checks"][0]["status"], "fail");
        assert_eq!(json["checks"][1]["error"], "0");
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("name,status,kind,error,witness,ms,detail\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
