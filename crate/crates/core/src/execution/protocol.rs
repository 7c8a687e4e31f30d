//! Adapter wire format.
//!
//! The core writes one [`AdapterRequest`] to the adapter's stdin and reads one
//! [`AdapterResponse`] from its stdout. Exit code 0 means the protocol
//! succeeded regardless of test outcomes; exit code 2 carries an
//! [`AdapterFailure`] describing a protocol violation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ExecError, TestStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Suite,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Per-test wall-clock limit.
    pub wall_clock_seconds: f64,
    pub memory_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub program_path: String,
    pub suite_path: String,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case_name: Option<String>,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterVerdict {
    pub name: String,
    pub status: TestStatus,
    #[serde(default)]
    pub message: String,
    #[serde(default)]
    pub covered_lines: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub verdicts: Vec<AdapterVerdict>,
    pub suite_line_coverage: f64,
    pub suite_branch_coverage: f64,
    #[serde(default)]
    pub covered_line_set: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterFailure {
    pub error: String,
}

impl AdapterResponse {
    /// Parse stdout and check the response against the program it describes.
    pub fn parse(stdout: &str, program_lines: usize) -> Result<Self, ExecError> {
        let resp: AdapterResponse = serde_json::from_str(stdout.trim())
            .map_err(|e| ExecError::ProtocolError(format!("malformed response: {e}")))?;
        resp.validate(program_lines)?;
        Ok(resp)
    }

    pub fn validate(&self, program_lines: usize) -> Result<(), ExecError> {
        let in_range = |l: &u32| *l >= 1 && (*l as usize) <= program_lines;
        for pct in [self.suite_line_coverage, self.suite_branch_coverage] {
            if !(0.0..=100.0).contains(&pct) || pct.is_nan() {
                return Err(ExecError::ProtocolError(format!(
                    "coverage {pct} outside [0, 100]"
                )));
            }
        }
        let mut names = BTreeSet::new();
        for v in &self.verdicts {
            if !names.insert(v.name.as_str()) {
                return Err(ExecError::ProtocolError(format!(
                    "duplicate verdict for `{}`",
                    v.name
                )));
            }
            if let Some(l) = v.covered_lines.iter().find(|l| !in_range(l)) {
                return Err(ExecError::ProtocolError(format!(
                    "`{}` covers line {l} outside the program's {program_lines} lines",
                    v.name
                )));
            }
        }
        if let Some(l) = self.covered_line_set.iter().find(|l| !in_range(l)) {
            return Err(ExecError::ProtocolError(format!(
                "suite covers line {l} outside the program"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_omits_absent_case_name() {
        let req = AdapterRequest {
            program_path: "/p.py".into(),
            suite_path: "/t.py".into(),
            mode: Mode::Suite,
            case_name: None,
            limits: Limits {
                wall_clock_seconds: 30.0,
                memory_bytes: 1,
            },
        };
        let json = serde_json::to_value(&req).unwrap();
        assert_eq!(json["mode"], "suite");
        assert!(json.get("case_name").is_none());
    }

    #[test]
    fn parses_and_validates_responses() {
        let ok = r#"{"verdicts":[{"name":"test_a","status":"pass","message":"","covered_lines":[1,2]}],
                     "suite_line_coverage":100.0,"suite_branch_coverage":50.0,"covered_line_set":[1,2]}"#;
        let resp = AdapterResponse::parse(ok, 2).unwrap();
        assert_eq!(resp.verdicts[0].status, TestStatus::Pass);

        assert!(matches!(
            AdapterResponse::parse(ok, 1),
            Err(ExecError::ProtocolError(_))
        ));
        assert!(matches!(
            AdapterResponse::parse("not json", 5),
            Err(ExecError::ProtocolError(_))
        ));
        let bad_status = ok.replace("\"pass\"", "\"flaky\"");
        assert!(AdapterResponse::parse(&bad_status, 2).is_err());
    }
}
