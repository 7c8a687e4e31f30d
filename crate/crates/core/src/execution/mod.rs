//! Running programs and generated suites, and normalising what comes back.
//!
//! Test suites are executed through a target-language adapter: an external
//! executable that receives one JSON request on stdin and answers with one
//! JSON document on stdout (see [`protocol`]). Programs themselves are run
//! directly through the configured interpreter for smoke checks and
//! differential output comparison.

mod adapter;
mod archive;
pub mod protocol;
mod region;
pub mod sandbox;

pub use adapter::AdapterExecutor;
pub use archive::{ArchiveMode, ArchivedExecutor};
pub use region::{covers_region, Version};
pub use sandbox::SandboxPolicy;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::generation::TestSuite;

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("adapter crashed: {0}")]
    AdapterCrash(String),
    #[error("adapter protocol error: {0}")]
    ProtocolError(String),
    #[error("unknown test case `{0}`")]
    UnknownCase(String),
    #[error("no recorded execution for digest {0}")]
    ReplayMiss(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestStatus {
    Pass,
    Fail,
    Error,
    Timeout,
}

impl TestStatus {
    pub fn is_pass(self) -> bool {
        self == TestStatus::Pass
    }
}

/// Outcome of one test case against one program version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub case_name: String,
    pub status: TestStatus,
    pub message: String,
    /// 1-based lines of the program under test executed by this case.
    pub covered_lines: BTreeSet<u32>,
    /// Set when coverage was cut short (timeouts, adapter fallback).
    #[serde(default)]
    pub partial_coverage: bool,
}

/// Normalised result of running a whole suite against one program version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub program_ref: String,
    pub suite_ref: String,
    pub verdicts: Vec<TestVerdict>,
    pub suite_line_coverage: f64,
    pub suite_branch_coverage: f64,
    pub covered_line_set: BTreeSet<u32>,
    pub n_tests: usize,
    pub pass_rate: f64,
    /// True when the suite-level run had to be reconstructed from single-case runs.
    #[serde(default)]
    pub degraded: bool,
}

impl ExecutionReport {
    pub fn new(
        program_ref: impl Into<String>,
        suite_ref: impl Into<String>,
        verdicts: Vec<TestVerdict>,
        suite_line_coverage: f64,
        suite_branch_coverage: f64,
        covered_line_set: BTreeSet<u32>,
    ) -> Self {
        let n_tests = verdicts.len();
        let passed = verdicts.iter().filter(|v| v.status.is_pass()).count();
        let pass_rate = if n_tests == 0 {
            0.0
        } else {
            100.0 * passed as f64 / n_tests as f64
        };
        Self {
            program_ref: program_ref.into(),
            suite_ref: suite_ref.into(),
            verdicts,
            suite_line_coverage,
            suite_branch_coverage,
            covered_line_set,
            n_tests,
            pass_rate,
            degraded: false,
        }
    }

    pub fn verdict(&self, case: &str) -> Option<&TestVerdict> {
        self.verdicts.iter().find(|v| v.case_name == case)
    }

    /// Cases whose status is anything but Pass.
    pub fn failing(&self) -> impl Iterator<Item = &TestVerdict> {
        self.verdicts.iter().filter(|v| !v.status.is_pass())
    }

    pub fn all_pass(&self) -> bool {
        self.n_tests > 0 && self.verdicts.iter().all(|v| v.status.is_pass())
    }
}

/// Captured output of running a program on one stdin payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: Option<i32>,
    pub timed_out: bool,
}

impl ProgramOutput {
    pub fn succeeded(&self) -> bool {
        !self.timed_out && self.exit_code == Some(0)
    }

    /// Observable behaviour for differential comparison: stdout plus the
    /// crash/timeout class.
    pub fn observation(&self) -> (String, Option<i32>, bool) {
        let code = self.exit_code.map(|c| if c == 0 { 0 } else { 1 });
        (self.stdout.clone(), code, self.timed_out)
    }
}

/// Runs suites and programs. Implementations must be thread-safe: stages fan
/// out over variants.
pub trait Executor: Send + Sync {
    fn run_suite(&self, program: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError>;

    fn run_single(
        &self,
        program: &Path,
        suite: &TestSuite,
        case: &str,
    ) -> Result<TestVerdict, ExecError>;

    fn run_program(
        &self,
        program: &Path,
        stdin: &str,
        limit: Duration,
    ) -> Result<ProgramOutput, ExecError>;

    /// Collection check: `Err` carries the compiler/collector message shown
    /// to the model on a repair attempt.
    fn check_suite(&self, suite: &TestSuite) -> Result<(), String>;
}

impl<E: Executor + ?Sized> Executor for &E {
    fn run_suite(&self, program: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError> {
        (**self).run_suite(program, suite)
    }
    fn run_single(
        &self,
        program: &Path,
        suite: &TestSuite,
        case: &str,
    ) -> Result<TestVerdict, ExecError> {
        (**self).run_single(program, suite, case)
    }
    fn run_program(
        &self,
        program: &Path,
        stdin: &str,
        limit: Duration,
    ) -> Result<ProgramOutput, ExecError> {
        (**self).run_program(program, stdin, limit)
    }
    fn check_suite(&self, suite: &TestSuite) -> Result<(), String> {
        (**self).check_suite(suite)
    }
}

impl<E: Executor + ?Sized> Executor for Box<E> {
    fn run_suite(&self, program: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError> {
        (**self).run_suite(program, suite)
    }
    fn run_single(
        &self,
        program: &Path,
        suite: &TestSuite,
        case: &str,
    ) -> Result<TestVerdict, ExecError> {
        (**self).run_single(program, suite, case)
    }
    fn run_program(
        &self,
        program: &Path,
        stdin: &str,
        limit: Duration,
    ) -> Result<ProgramOutput, ExecError> {
        (**self).run_program(program, stdin, limit)
    }
    fn check_suite(&self, suite: &TestSuite) -> Result<(), String> {
        (**self).check_suite(suite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(name: &str, status: TestStatus) -> TestVerdict {
        TestVerdict {
            case_name: name.into(),
            status,
            message: String::new(),
            covered_lines: BTreeSet::new(),
            partial_coverage: false,
        }
    }

    #[test]
    fn pass_rate_counts_only_pass() {
        let report = ExecutionReport::new(
            "p",
            "s",
            vec![
                verdict("a", TestStatus::Pass),
                verdict("b", TestStatus::Pass),
                verdict("c", TestStatus::Fail),
            ],
            0.0,
            0.0,
            BTreeSet::new(),
        );
        assert!((report.pass_rate - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(format!("{:.1}", report.pass_rate), "66.7");
        assert_eq!(report.failing().count(), 1);
        assert!(!report.all_pass());
    }

    #[test]
    fn empty_report_has_zero_pass_rate() {
        let report = ExecutionReport::new("p", "s", vec![], 0.0, 0.0, BTreeSet::new());
        assert_eq!(report.pass_rate, 0.0);
        assert!(!report.all_pass());
    }
}
