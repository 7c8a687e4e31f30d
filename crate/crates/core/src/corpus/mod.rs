//! Seed programs: ingestion filters, LOC strata and the per-band selection quota.

mod strata;

pub use strata::{stratify, SelectionQuota, Selector, StrataAssignment, BANDS};

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::execution::Executor;
use crate::par::{self, Parallelism};
use crate::python::{is_stdlib, PySource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageTag {
    Python,
}

impl LanguageTag {
    pub fn extension(self) -> &'static str {
        match self {
            LanguageTag::Python => "py",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    /// Reads stdin, writes stdout.
    StdinScript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedProgram {
    pub id: String,
    pub source_path: PathBuf,
    pub loc: usize,
    /// Set by stratification.
    pub stratum: Option<u8>,
    pub entry_mode: EntryMode,
}

impl SeedProgram {
    pub fn source(&self) -> std::io::Result<String> {
        std::fs::read_to_string(&self.source_path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectionReason {
    Unreadable {
        detail: String,
    },
    SyntaxError {
        line: usize,
    },
    ThirdPartyImport {
        module: String,
    },
    RelativeImport {
        module: String,
    },
    Timeout,
    Crash {
        exit_code: Option<i32>,
        stderr_tail: String,
    },
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub path: PathBuf,
    pub reason: RejectionReason,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("no candidate program survived ingestion ({rejected} rejected)")]
    EmptyCorpus { rejected: usize },
    #[error("stratification needs at least 4 programs, got {0}")]
    TooFewPrograms(usize),
    #[error("corpus directory {0} is not readable: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("smoke execution failed: {0}")]
    Execution(#[from] crate::execution::ExecError),
}

/// Programs that passed ingestion plus the per-file rejection log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ingested {
    pub programs: Vec<SeedProgram>,
    pub rejections: Vec<Rejection>,
}

/// Inputs tried by the smoke run, in order.
pub const SMOKE_INPUTS: [&str; 2] = ["", "1\na\n"];

pub fn count_loc(source: &str) -> usize {
    source.lines().filter(|l| !l.trim().is_empty()).count()
}

/// Stable, filesystem-safe id from a path relative to the corpus root.
pub fn program_id(relative: &Path) -> String {
    let stem = relative.with_extension("");
    stem.to_string_lossy()
        .chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' => c,
            '/' | '\\' => '.',
            _ => '_',
        })
        .collect()
}

fn candidates(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = std::fs::read_dir(&d).map_err(|e| CorpusError::Io(d.clone(), e))?;
        for entry in entries {
            let path = entry.map_err(|e| CorpusError::Io(d.clone(), e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == ext) {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Static checks: parse and self-containment.
fn static_check(source: &str) -> Result<(), RejectionReason> {
    if count_loc(source) == 0 {
        return Err(RejectionReason::Empty);
    }
    let src = PySource::parse(source).map_err(|e| RejectionReason::SyntaxError { line: e.line })?;
    for import in src.imports() {
        if import.relative {
            return Err(RejectionReason::RelativeImport {
                module: import.module,
            });
        }
        if !is_stdlib(&import.module) {
            return Err(RejectionReason::ThirdPartyImport {
                module: import.module,
            });
        }
    }
    Ok(())
}

/// Run the program on each smoke input until one exits cleanly in time.
fn smoke<E: Executor + ?Sized>(
    executor: &E,
    path: &Path,
    limit: Duration,
) -> Result<Option<RejectionReason>, CorpusError> {
    let mut last = None;
    for stdin in SMOKE_INPUTS {
        let out = executor.run_program(path, stdin, limit)?;
        if out.succeeded() {
            return Ok(None);
        }
        last = Some(if out.timed_out {
            RejectionReason::Timeout
        } else {
            let lines: Vec<&str> = out.stderr.lines().collect();
            let stderr_tail = lines[lines.len().saturating_sub(3)..].join("\n");
            RejectionReason::Crash {
                exit_code: out.exit_code,
                stderr_tail,
            }
        });
    }
    Ok(last)
}

/// Scan `dir` for single-file programs and keep those that are
/// self-contained and survive a smoke execution.
pub fn ingest<E: Executor + ?Sized>(
    dir: &Path,
    language: LanguageTag,
    executor: &E,
    smoke_limit: Duration,
    mode: Parallelism,
) -> Result<Ingested, CorpusError> {
    let paths = candidates(dir, language.extension())?;
    let checked = par::map(
        mode,
        &paths,
        |path| -> Result<Result<SeedProgram, Rejection>, CorpusError> {
            let reject = |reason| {
                Ok(Err(Rejection {
                    path: path.clone(),
                    reason,
                }))
            };
            let source = match std::fs::read_to_string(path) {
                Ok(s) => s,
                Err(e) => {
                    return reject(RejectionReason::Unreadable {
                        detail: e.to_string(),
                    })
                }
            };
            if let Err(reason) = static_check(&source) {
                return reject(reason);
            }
            if let Some(reason) = smoke(executor, path, smoke_limit)? {
                return reject(reason);
            }
            let relative = path.strip_prefix(dir).unwrap_or(path);
            Ok(Ok(SeedProgram {
                id: program_id(relative),
                source_path: path.clone(),
                loc: count_loc(&source),
                stratum: None,
                entry_mode: EntryMode::StdinScript,
            }))
        },
    );
    let mut programs = Vec::new();
    let mut rejections = Vec::new();
    for item in checked {
        match item? {
            Ok(p) => programs.push(p),
            Err(r) => {
                log::info!("rejected {}: {:?}", r.path.display(), r.reason);
                rejections.push(r);
            }
        }
    }
    if programs.is_empty() {
        return Err(CorpusError::EmptyCorpus {
            rejected: rejections.len(),
        });
    }
    programs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Ingested {
        programs,
        rejections,
    })
}

/// The corpus manifest written by the ingest stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub language: LanguageTag,
    pub programs: Vec<SeedProgram>,
    pub boundaries: [usize; 3],
    pub rejections: Vec<Rejection>,
}
