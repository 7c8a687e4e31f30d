//! Behavioural checks on mutants: SPCs must keep the baseline suite green,
//! SACs must be observably different from the original.

use std::path::Path;
use std::time::Duration;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Category, CodeChange};
use crate::execution::{ExecError, Executor, TestStatus};
use crate::generation::TestSuite;

pub const POOL_SIZE: usize = 32;

fn materialise(change: &CodeChange) -> std::io::Result<(tempfile::TempDir, std::path::PathBuf)> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("mutant.py");
    std::fs::write(&path, &change.new_source)?;
    Ok((dir, path))
}

/// True iff every baseline test passes on the mutant.
pub fn verify_spc<E: Executor + ?Sized>(
    change: &CodeChange,
    baseline_suite: &TestSuite,
    executor: &E,
) -> Result<bool, ExecError> {
    debug_assert_eq!(change.category, Category::Spc);
    let (_dir, path) = materialise(change)?;
    let report = executor.run_suite(&path, baseline_suite)?;
    if !report.all_pass() {
        for v in report.failing() {
            log::info!(
                "{}/{}: baseline test {} {:?} on mutant",
                change.program_id,
                change.operator,
                v.case_name,
                v.status
            );
        }
    }
    Ok(report.all_pass() && report.n_tests > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SacStatus {
    Diverging,
    PossiblyEquivalent,
}

/// Evidence that a mutant behaves differently from its original.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A pooled stdin payload on which the two versions disagree.
    Input {
        stdin: String,
        original_stdout: String,
        mutant_stdout: String,
    },
    /// A baseline test that does not pass on the mutant.
    Test {
        case_name: String,
        status: TestStatus,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SacVerdict {
    pub status: SacStatus,
    pub witness: Option<Witness>,
}

impl SacVerdict {
    pub fn is_diverging(&self) -> bool {
        self.status == SacStatus::Diverging
    }
}

/// Differential screen of a SAC mutant against the baseline suite first and
/// the input pool second.
pub fn verify_sac<E: Executor + ?Sized>(
    change: &CodeChange,
    original: &Path,
    baseline_suite: &TestSuite,
    pool: &[String],
    executor: &E,
    limit: Duration,
) -> Result<SacVerdict, ExecError> {
    debug_assert_eq!(change.category, Category::Sac);
    let (_dir, mutant) = materialise(change)?;
    let report = executor.run_suite(&mutant, baseline_suite)?;
    if let Some(v) = report.failing().next() {
        return Ok(SacVerdict {
            status: SacStatus::Diverging,
            witness: Some(Witness::Test {
                case_name: v.case_name.clone(),
                status: v.status,
                message: v.message.clone(),
            }),
        });
    }
    for stdin in pool {
        let a = executor.run_program(original, stdin, limit)?;
        let b = executor.run_program(&mutant, stdin, limit)?;
        if a.observation() != b.observation() {
            return Ok(SacVerdict {
                status: SacStatus::Diverging,
                witness: Some(Witness::Input {
                    stdin: stdin.clone(),
                    original_stdout: a.stdout,
                    mutant_stdout: b.stdout,
                }),
            });
        }
    }
    Ok(SacVerdict {
        status: SacStatus::PossiblyEquivalent,
        witness: None,
    })
}

fn word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(1..=5);
    (0..len)
        .map(|_| (b'a' + rng.random_range(0..3u8)) as char)
        .collect()
}

/// Small stdin payloads in the shapes competitive-programming scripts read:
/// a count followed by words, a count followed by a row of integers, a
/// column of integers, and a pair of integers. The first entry is the fixed
/// smoke input.
pub fn input_pool(seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = vec!["1\na\n".to_string()];
    for i in 1..POOL_SIZE {
        let payload = match i % 4 {
            0 => {
                let n = rng.random_range(1..=10);
                let words: Vec<String> = (0..n).map(|_| word(&mut rng)).collect();
                format!("{n}\n{}\n", words.join("\n"))
            }
            1 => {
                let n = rng.random_range(1..=8);
                let xs: Vec<String> = (0..n)
                    .map(|_| rng.random_range(-10..=20i32).to_string())
                    .collect();
                format!("{n}\n{}\n", xs.join(" "))
            }
            2 => {
                let n = rng.random_range(1..=6);
                let xs: Vec<String> = (0..n)
                    .map(|_| rng.random_range(0..=30i32).to_string())
                    .collect();
                format!("{n}\n{}\n", xs.join("\n"))
            }
            _ => format!(
                "{} {}\n",
                rng.random_range(0..=50i32),
                rng.random_range(0..=50i32)
            ),
        };
        pool.push(payload);
    }
    pool
}
