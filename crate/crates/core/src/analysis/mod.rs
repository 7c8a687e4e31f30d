//! Metrics over execution reports: baseline filtering, failure attribution,
//! test matching across versions and the aggregate tables.

mod aggregate;
mod attribution;
mod churn;

pub use aggregate::{aggregate, AggregateRow, EvaluationRecord, Grouping, VariantStatus};
pub use attribution::{attribute_failures, classify, AttributionRecord, Classification};
pub use churn::{match_tests, ChurnReport, CoordinateError};

use serde::{Deserialize, Serialize};

use crate::execution::{ExecutionReport, TestStatus};

/// The per-suite scalar bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub pass_rate: f64,
    pub line_coverage: f64,
    pub branch_coverage: f64,
    pub n_tests: usize,
}

impl Metrics {
    pub fn of(report: &ExecutionReport) -> Self {
        Self {
            pass_rate: report.pass_rate,
            line_coverage: report.suite_line_coverage,
            branch_coverage: report.suite_branch_coverage,
            n_tests: report.n_tests,
        }
    }
}

/// Why a generated suite was unusable on the original program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureBucket {
    /// The suite could not run as written: bad imports, missing files,
    /// references to things the program does not define, no tests at all.
    SyntacticEnvironmental,
    /// The suite ran but asserted behaviour the program does not have.
    LogicalAssertion,
}

/// Exception names that mean the test never reached a meaningful assertion.
const ENVIRONMENTAL_ERRORS: [&str; 9] = [
    "ImportError",
    "ModuleNotFoundError",
    "FileNotFoundError",
    "SyntaxError",
    "IndentationError",
    "NameError",
    "AttributeError",
    "fixture",
    "PermissionError",
];

fn is_environmental(status: TestStatus, message: &str) -> bool {
    status == TestStatus::Error && ENVIRONMENTAL_ERRORS.iter().any(|e| message.contains(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineDecision {
    pub accepted: bool,
    pub bucket: Option<FailureBucket>,
}

/// A baseline suite is kept only if every case passes on the original.
pub fn accept_baseline(report: &ExecutionReport) -> BaselineDecision {
    if report.n_tests == 0 {
        return BaselineDecision {
            accepted: false,
            bucket: Some(FailureBucket::SyntacticEnvironmental),
        };
    }
    if report.all_pass() {
        return BaselineDecision {
            accepted: true,
            bucket: None,
        };
    }
    let environmental = report
        .failing()
        .any(|v| is_environmental(v.status, &v.message));
    let bucket = if environmental {
        FailureBucket::SyntacticEnvironmental
    } else {
        FailureBucket::LogicalAssertion
    };
    BaselineDecision {
        accepted: false,
        bucket: Some(bucket),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::execution::TestVerdict;

    fn report(statuses: &[(TestStatus, &str)]) -> ExecutionReport {
        let verdicts = statuses
            .iter()
            .enumerate()
            .map(|(i, (s, m))| TestVerdict {
                case_name: format!("test_{i}"),
                status: *s,
                message: m.to_string(),
                covered_lines: BTreeSet::new(),
                partial_coverage: false,
            })
            .collect();
        ExecutionReport::new("p", "s", verdicts, 0.0, 0.0, BTreeSet::new())
    }

    #[test]
    fn all_pass_is_accepted() {
        let d = accept_baseline(&report(&[(TestStatus::Pass, ""); 3]));
        assert_eq!(
            d,
            BaselineDecision {
                accepted: true,
                bucket: None
            }
        );
    }

    #[test]
    fn import_error_is_environmental() {
        let mut s = vec![(TestStatus::Pass, ""); 9];
        s.push((
            TestStatus::Error,
            "ModuleNotFoundError: No module named 'helpers'",
        ));
        let d = accept_baseline(&report(&s));
        assert_eq!(d.bucket, Some(FailureBucket::SyntacticEnvironmental));
        assert!(!d.accepted);
    }

    #[test]
    fn assertion_failure_is_logical() {
        let d = accept_baseline(&report(&[
            (TestStatus::Pass, ""),
            (TestStatus::Fail, "assert '9' == '10'"),
        ]));
        assert_eq!(d.bucket, Some(FailureBucket::LogicalAssertion));
    }

    #[test]
    fn empty_suite_is_environmental() {
        let d = accept_baseline(&report(&[]));
        assert_eq!(
            d,
            BaselineDecision {
                accepted: false,
                bucket: Some(FailureBucket::SyntacticEnvironmental)
            }
        );
    }
}
