use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExecError, ExecutionReport, Executor, ProgramOutput, TestVerdict};
use crate::generation::TestSuite;
use crate::util::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchiveMode {
    /// Delegate to the inner executor and persist every answer.
    Record,
    /// Answer only from the archive.
    Replay,
}

/// Record/replay wrapper around another executor. Entries are keyed by the
/// content of the request (program text, suite text, case, stdin), so a
/// replayed run needs neither the interpreter nor the adapter.
pub struct ArchivedExecutor<E> {
    inner: Option<E>,
    dir: PathBuf,
    mode: ArchiveMode,
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    kind: String,
    result: T,
}

impl<E: Executor> ArchivedExecutor<E> {
    pub fn record(inner: E, dir: impl Into<PathBuf>) -> Self {
        Self {
            inner: Some(inner),
            dir: dir.into(),
            mode: ArchiveMode::Record,
        }
    }

    pub fn replay(dir: impl Into<PathBuf>) -> Self {
        Self {
            inner: None,
            dir: dir.into(),
            mode: ArchiveMode::Replay,
        }
    }

    fn key(parts: &[&[u8]]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn through<T, F>(&self, kind: &str, key: String, call: F) -> Result<T, ExecError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce(&E) -> Result<T, ExecError>,
    {
        let path = self.path(&key);
        match (self.mode, &self.inner) {
            (ArchiveMode::Replay, _) | (ArchiveMode::Record, None) => {
                let bytes = std::fs::read(&path).map_err(|_| ExecError::ReplayMiss(key.clone()))?;
                let entry: Entry<T> = serde_json::from_slice(&bytes).map_err(|e| {
                    ExecError::ProtocolError(format!("corrupt archive entry {key}: {e}"))
                })?;
                Ok(entry.result)
            }
            (ArchiveMode::Record, Some(inner)) => {
                let result = call(inner)?;
                let entry = Entry {
                    kind: kind.to_string(),
                    result,
                };
                let body = serde_json::to_vec_pretty(&entry).expect("entry serialises");
                write_atomic(&path, &body)?;
                Ok(entry.result)
            }
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, ExecError> {
    Ok(std::fs::read(path)?)
}

impl<E: Executor> Executor for ArchivedExecutor<E> {
    fn run_suite(&self, program: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError> {
        let key = Self::key(&[b"suite", &read(program)?, suite.suite_source.as_bytes()]);
        self.through("suite", key, |e| e.run_suite(program, suite))
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
        let key = Self::key(&[
            b"single",
            &read(program)?,
            suite.suite_source.as_bytes(),
            case.as_bytes(),
        ]);
        self.through("single", key, |e| e.run_single(program, suite, case))
    }

    fn run_program(
        &self,
        program: &Path,
        stdin: &str,
        limit: Duration,
    ) -> Result<ProgramOutput, ExecError> {
        let key = Self::key(&[b"program", &read(program)?, stdin.as_bytes()]);
        self.through("program", key, |e| e.run_program(program, stdin, limit))
    }

    fn check_suite(&self, suite: &TestSuite) -> Result<(), String> {
        let key = Self::key(&[b"check", suite.suite_source.as_bytes()]);
        self.through::<Result<(), String>, _>("check", key, |e| Ok(e.check_suite(suite)))
            .unwrap_or_else(|e| Err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;
    use crate::execution::TestStatus;
    use crate::generation::{TestCase, VariantLabel};

    struct Counting(AtomicUsize);

    impl Executor for Counting {
        fn run_suite(&self, _: &Path, suite: &TestSuite) -> Result<ExecutionReport, ExecError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(ExecutionReport::new(
                "p",
                &suite.program_id,
                vec![],
                10.0,
                5.0,
                BTreeSet::new(),
            ))
        }
        fn run_single(
            &self,
            _: &Path,
            _: &TestSuite,
            case: &str,
        ) -> Result<TestVerdict, ExecError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(TestVerdict {
                case_name: case.into(),
                status: TestStatus::Pass,
                message: String::new(),
                covered_lines: [1, 2].into(),
                partial_coverage: false,
            })
        }
        fn run_program(
            &self,
            _: &Path,
            stdin: &str,
            _: Duration,
        ) -> Result<ProgramOutput, ExecError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(ProgramOutput {
                stdout: stdin.to_uppercase(),
                stderr: String::new(),
                exit_code: Some(0),
                timed_out: false,
            })
        }
        fn check_suite(&self, _: &TestSuite) -> Result<(), String> {
            Err("SyntaxError: nope".into())
        }
    }

    #[test]
    fn replays_what_was_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let program = dir.path().join("p.py");
        std::fs::write(&program, "print(input())\n").unwrap();
        let suite = TestSuite {
            suite_source: "def test_a():\n    pass\n".into(),
            cases: vec![TestCase {
                name: "test_a".into(),
                body_span: (0, 22),
            }],
            program_id: "p".into(),
            variant_label: VariantLabel::Baseline,
        };
        let archive = dir.path().join("archive");
        let recorder = ArchivedExecutor::record(Counting(AtomicUsize::new(0)), &archive);
        let out = recorder
            .run_program(&program, "abc", Duration::from_secs(1))
            .unwrap();
        let verdict = recorder.run_single(&program, &suite, "test_a").unwrap();
        let report = recorder.run_suite(&program, &suite).unwrap();
        assert_eq!(
            recorder.check_suite(&suite),
            Err("SyntaxError: nope".into())
        );

        let replayer: ArchivedExecutor<Counting> = ArchivedExecutor::replay(&archive);
        assert_eq!(
            replayer
                .run_program(&program, "abc", Duration::from_secs(1))
                .unwrap(),
            out
        );
        assert_eq!(
            replayer.run_single(&program, &suite, "test_a").unwrap(),
            verdict
        );
        assert_eq!(replayer.run_suite(&program, &suite).unwrap(), report);
        assert_eq!(
            replayer.check_suite(&suite),
            Err("SyntaxError: nope".into())
        );
        assert!(matches!(
            replayer.run_program(&program, "other", Duration::from_secs(1)),
            Err(ExecError::ReplayMiss(_))
        ));
        assert!(matches!(
            replayer.run_single(&program, &suite, "test_zzz"),
            Err(ExecError::UnknownCase(_))
        ));
    }
}
