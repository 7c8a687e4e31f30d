use std::collections::BTreeSet;
use std::path::Path;
use std::time::Duration;

use log::{debug, warn};

use super::protocol::{AdapterFailure, AdapterRequest, AdapterResponse, Limits, Mode};
use super::sandbox::{self, SandboxPolicy, SandboxRun};
use super::{ExecError, ExecutionReport, Executor, ProgramOutput, TestStatus, TestVerdict};
use crate::generation::TestSuite;

const PROGRAM_FILE: &str = "program_under_test.py";
const SUITE_FILE: &str = "test_generated.py";

const COMPILE_CHECK: &str = "import sys\n\
src = open(sys.argv[1], encoding='utf-8').read()\n\
try:\n    compile(src, 'test_generated.py', 'exec')\n\
except SyntaxError as e:\n    print(f'{type(e).__name__}: {e.msg} (line {e.lineno})')\n    sys.exit(1)\n";

/// Executes suites through an external adapter process and programs through
/// the target interpreter, each in its own sandbox.
#[derive(Debug, Clone)]
pub struct AdapterExecutor {
    adapter: Vec<String>,
    interpreter: Vec<String>,
    policy: SandboxPolicy,
}

impl AdapterExecutor {
    pub fn new(adapter: Vec<String>, interpreter: Vec<String>, policy: SandboxPolicy) -> Self {
        Self {
            adapter,
            interpreter,
            policy,
        }
    }

    pub fn policy(&self) -> &SandboxPolicy {
        &self.policy
    }

    fn limits(&self) -> Limits {
        Limits {
            wall_clock_seconds: self.policy.wall_clock_limit,
            memory_bytes: self.policy.memory_limit,
        }
    }

    fn invoke(
        &self,
        program: &Path,
        suite: &TestSuite,
        mode: Mode,
        case_name: Option<&str>,
        envelope: Duration,
    ) -> Result<(SandboxRun, usize), ExecError> {
        let dir = self.policy.workdir()?;
        let program_path = dir.path().join(PROGRAM_FILE);
        let suite_path = dir.path().join(SUITE_FILE);
        let program_source = std::fs::read_to_string(program)?;
        std::fs::write(&program_path, &program_source)?;
        std::fs::write(&suite_path, &suite.suite_source)?;
        let request = AdapterRequest {
            program_path: program_path.display().to_string(),
            suite_path: suite_path.display().to_string(),
            mode,
            case_name: case_name.map(str::to_string),
            limits: self.limits(),
        };
        let body = serde_json::to_vec(&request).expect("request serialises");
        let run = sandbox::run(&self.adapter, dir.path(), &body, envelope, &self.policy)?;
        debug!(
            "adapter {:?} on {} finished in {:?} (timed_out={})",
            mode,
            program.display(),
            run.elapsed,
            run.timed_out
        );
        Ok((run, crate::python::line_count(&program_source)))
    }

    fn response(run: &SandboxRun, program_lines: usize) -> Result<AdapterResponse, ExecError> {
        match run.exit_code() {
            Some(0) => AdapterResponse::parse(&run.stdout_text(), program_lines),
            Some(2) => {
                let failure: Result<AdapterFailure, _> =
                    serde_json::from_str(run.stdout_text().trim());
                Err(ExecError::ProtocolError(match failure {
                    Ok(f) => f.error,
                    Err(_) => tail(&run.stderr_text()),
                }))
            }
            code => Err(ExecError::AdapterCrash(format!(
                "exit {:?}: {}",
                code,
                tail(&run.stderr_text())
            ))),
        }
    }

    fn timeout_verdict(case: &str, limit: Duration) -> TestVerdict {
        TestVerdict {
            case_name: case.to_string(),
            status: TestStatus::Timeout,
            message: format!("killed after exceeding {:.1}s", limit.as_secs_f64()),
            covered_lines: BTreeSet::new(),
            partial_coverage: true,
        }
    }

    /// Rebuild a suite report from isolated single-case runs after the
    /// suite-level invocation blew its time envelope.
    fn fallback_suite(
        &self,
        program: &Path,
        suite: &TestSuite,
    ) -> Result<ExecutionReport, ExecError> {
        warn!(
            "suite run for {} exceeded its envelope; re-running cases individually",
            suite.program_id
        );
        let mut verdicts = Vec::with_capacity(suite.len());
        for case in &suite.cases {
            verdicts.push(self.run_single(program, suite, &case.name)?);
        }
        let covered: BTreeSet<u32> = verdicts
            .iter()
            .flat_map(|v| v.covered_lines.iter().copied())
            .collect();
        let executable = crate::python::line_count(&std::fs::read_to_string(program)?).max(1);
        let line_cov = 100.0 * covered.len() as f64 / executable as f64;
        let mut report = ExecutionReport::new(
            program_ref(program)?,
            suite.program_id.clone(),
            verdicts,
            line_cov.min(100.0),
            0.0,
            covered,
        );
        report.degraded = true;
        Ok(report)
    }
}

/// Reports name programs by content, not by path, so they do not depend on
/// where a run directory lives.
fn program_ref(program: &Path) -> Result<String, ExecError> {
    Ok(format!(
        "sha256:{}",
        crate::util::sha256_hex(&std::fs::read(program)?)
    ))
}

fn tail(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines.len().saturating_sub(20);
    lines[start..].join("\n")
}

impl Executor for AdapterExecutor {
    fn run_suite(&self, program: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError> {
        let envelope = self.policy.limit() * suite.len().max(1) as u32 + self.policy.grace();
        let (run, program_lines) = self.invoke(program, suite, Mode::Suite, None, envelope)?;
        if run.timed_out {
            return self.fallback_suite(program, suite);
        }
        let resp = Self::response(&run, program_lines)?;
        let mut by_name: std::collections::HashMap<String, _> = resp
            .verdicts
            .into_iter()
            .map(|v| (v.name.clone(), v))
            .collect();
        let mut verdicts = Vec::with_capacity(suite.len());
        for case in &suite.cases {
            let v = by_name.remove(&case.name).ok_or_else(|| {
                ExecError::ProtocolError(format!("no verdict for `{}`", case.name))
            })?;
            verdicts.push(TestVerdict {
                case_name: v.name,
                partial_coverage: v.status == TestStatus::Timeout,
                status: v.status,
                message: v.message,
                covered_lines: v.covered_lines,
            });
        }
        if let Some(extra) = by_name.keys().next() {
            return Err(ExecError::ProtocolError(format!(
                "verdict for unknown case `{extra}`"
            )));
        }
        Ok(ExecutionReport::new(
            program_ref(program)?,
            suite.program_id.clone(),
            verdicts,
            resp.suite_line_coverage,
            resp.suite_branch_coverage,
            resp.covered_line_set,
        ))
    }

    fn run_single(
        &self,
        program: &Path,
        suite: &TestSuite,
        case: &str,
    ) -> Result<TestVerdict, ExecError> {
        if suite.case(case).is_none() {
            return Err(ExecError::UnknownCase(case.to_string()));
        }
        let envelope = self.policy.limit() + self.policy.grace();
        let (run, program_lines) =
            self.invoke(program, suite, Mode::Single, Some(case), envelope)?;
        if run.timed_out {
            return Ok(Self::timeout_verdict(case, self.policy.limit()));
        }
        let resp = Self::response(&run, program_lines)?;
        let mut verdicts = resp.verdicts.into_iter();
        match (verdicts.next(), verdicts.next()) {
            (Some(v), None) if v.name == case => Ok(TestVerdict {
                case_name: v.name,
                partial_coverage: v.status == TestStatus::Timeout,
                status: v.status,
                message: v.message,
                covered_lines: v.covered_lines,
            }),
            _ => Err(ExecError::ProtocolError(format!(
                "single-case run of `{case}` must return exactly that verdict"
            ))),
        }
    }

    fn run_program(
        &self,
        program: &Path,
        stdin: &str,
        limit: Duration,
    ) -> Result<ProgramOutput, ExecError> {
        let dir = self.policy.workdir()?;
        let target = dir.path().join(PROGRAM_FILE);
        std::fs::copy(program, &target)?;
        let mut argv = self.interpreter.clone();
        argv.push(target.display().to_string());
        let run = sandbox::run(&argv, dir.path(), stdin.as_bytes(), limit, &self.policy)?;
        Ok(ProgramOutput {
            stdout: run.stdout_text(),
            stderr: run.stderr_text(),
            exit_code: run.exit_code(),
            timed_out: run.timed_out,
        })
    }

    fn check_suite(&self, suite: &TestSuite) -> Result<(), String> {
        let dir = self.policy.workdir().map_err(|e| e.to_string())?;
        let target = dir.path().join(SUITE_FILE);
        std::fs::write(&target, &suite.suite_source).map_err(|e| e.to_string())?;
        let mut argv = self.interpreter.clone();
        argv.extend([
            "-c".to_string(),
            COMPILE_CHECK.to_string(),
            target.display().to_string(),
        ]);
        let run = sandbox::run(&argv, dir.path(), b"", self.policy.limit(), &self.policy)
            .map_err(|e| format!("could not start interpreter: {e}"))?;
        if run.success() {
            Ok(())
        } else if run.timed_out {
            Err("compilation check timed out".to_string())
        } else {
            let out = run.stdout_text();
            let msg = if out.trim().is_empty() {
                run.stderr_text()
            } else {
                out
            };
            Err(msg.trim().to_string())
        }
    }
}
