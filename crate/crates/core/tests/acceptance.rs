//! Acceptance criteria 1-8, one PASS/FAIL line each.
//!
//!     cargo test -p testdrift --test acceptance
//!
//! Expected values come from hand-worked tables or brute-force oracles that
//! share no code with the implementation under test.

mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use testdrift::analysis::{attribute_failures, match_tests, Classification};
use testdrift::corpus::{stratify, EntryMode, SeedProgram, BANDS};
use testdrift::execution::{
    ExecError, ExecutionReport, Executor, ProgramOutput, TestStatus, TestVerdict,
};
use testdrift::generation::{TestSuite, VariantLabel};
use testdrift::mutation::{
    first_change, input_pool, verify_sac, verify_spc, Category, OperatorId, SacStatus,
};
use testdrift::par::{self, Parallelism};
use testdrift::pipeline::{Run, RunConfig, ATTRIBUTION_CSV, CHURN_CSV, METRICS_CSV};
use testdrift::util::sha256_hex;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn need_python() -> Result<(), String> {
    check(support::python_available(), || {
        "python3 is not available".into()
    })
}

fn within(started: Instant, budget: Duration) -> Result<(), String> {
    let took = started.elapsed();
    check(took <= budget, || {
        format!("took {took:.1?}, budget {budget:?}")
    })
}

// 1. BoundaryShift on the reconstructed motivating program.
fn motivating_example() -> Outcome {
    let started = Instant::now();
    need_python()?;
    let exec = support::executor();
    let program = support::fixtures().join("corpus/p02701.py");
    let source = std::fs::read_to_string(&program).map_err(|e| e.to_string())?;
    let change = first_change("p02701", &source, OperatorId::BoundaryShift, 0)
        .map_err(|e| e.to_string())?
        .ok_or("BoundaryShift does not apply")?;
    check(change.new_source.contains("for _ in range(n - 1):"), || {
        "unexpected rewrite".into()
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mutant = dir.path().join("mutant.py");
    std::fs::write(&mutant, &change.new_source).map_err(|e| e.to_string())?;
    let ten = "10\na\nbb\nccc\ndddd\neeeee\nffffff\nggggggg\nhhhhhhhh\niiiiiiiii\njjjjjjjjjj\n";
    let limit = Duration::from_secs(5);
    let a = exec
        .run_program(&program, ten, limit)
        .map_err(|e| e.to_string())?;
    let b = exec
        .run_program(&mutant, ten, limit)
        .map_err(|e| e.to_string())?;
    check(a.stdout == "10\n" && b.stdout == "9\n", || {
        format!("original {:?}, mutant {:?}", a.stdout, b.stdout)
    })?;

    let baseline = support::reference_suite("p02701");
    let sac = verify_sac(&change, &program, &baseline, &input_pool(0), &exec, limit)
        .map_err(|e| e.to_string())?;
    check(sac.status == SacStatus::Diverging, || format!("{sac:?}"))?;

    let fig = support::suite_from_file(
        &support::fixtures().join("motivating/test_p02701.py"),
        "p02701",
        VariantLabel::Mutant(OperatorId::BoundaryShift),
    );
    let report = exec.run_suite(&mutant, &fig).map_err(|e| e.to_string())?;
    let records =
        attribute_failures(&change, &report, &program, &fig, &exec).map_err(|e| e.to_string())?;
    let case = "TestDistinctStrings::test_all_lengths_unique";
    let rec = records
        .iter()
        .find(|r| r.case_name == case)
        .ok_or("the 10-string test did not fail on the mutant")?;
    check(
        rec.classification == Classification::ResiduallyAligned,
        || format!("{rec:?}"),
    )?;
    check(records.len() == 1, || {
        format!("expected one failing test, got {records:?}")
    })?;
    within(started, Duration::from_secs(10))?;
    Ok(format!(
        "original \"10\", mutant \"9\", {case} -> ResiduallyAligned"
    ))
}

// 2. Edit-size law over the fixture corpus.
fn edit_size_law() -> Outcome {
    let started = Instant::now();
    let corpus = support::corpus();
    check(corpus.len() == 20, || {
        format!("fixture corpus has {} programs", corpus.len())
    })?;
    let mut sizes: BTreeMap<Category, Vec<u32>> = BTreeMap::new();
    for (id, _, src) in &corpus {
        for op in OperatorId::ALL {
            let Some(c) = first_change(id, src, op, 0).map_err(|e| format!("{id}/{op}: {e}"))?
            else {
                continue;
            };
            match op.category() {
                Category::Sac => check(c.lines_changed == 1, || {
                    format!("{id}/{op}: SAC changed {}", c.lines_changed)
                })?,
                Category::Spc => check(c.lines_changed <= 7, || {
                    format!("{id}/{op}: SPC changed {}", c.lines_changed)
                })?,
            }
            sizes
                .entry(op.category())
                .or_default()
                .push(c.lines_changed);
        }
    }
    let mean = |v: &[u32]| v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64;
    let sac = sizes.get(&Category::Sac).ok_or("no SAC applied")?;
    let spc = sizes.get(&Category::Spc).ok_or("no SPC applied")?;
    check(mean(sac) == 1.0, || format!("SAC mean {}", mean(sac)))?;
    within(started, Duration::from_secs(30))?;
    Ok(format!(
        "SAC mean {:.1} over {} changes, SPC mean {:.3} over {} changes (max {})",
        mean(sac),
        sac.len(),
        mean(spc),
        spc.len(),
        spc.iter().max().unwrap()
    ))
}

// 3. SPC neutrality against the reference suites.
fn spc_neutrality() -> Outcome {
    let started = Instant::now();
    need_python()?;
    let exec = support::executor();
    let mut jobs = Vec::new();
    for (id, _, src) in support::corpus() {
        for op in OperatorId::spcs() {
            if let Some(c) = first_change(&id, &src, op, 0).map_err(|e| e.to_string())? {
                jobs.push(c);
            }
        }
    }
    let results = par::map(Parallelism::Parallel, &jobs, |c| {
        verify_spc(c, &support::reference_suite(&c.program_id), &exec).map_err(|e| e.to_string())
    });
    let mut per_op: BTreeMap<OperatorId, usize> = BTreeMap::new();
    let mut broken = Vec::new();
    for (c, r) in jobs.iter().zip(results) {
        if !r? {
            broken.push(format!("{}/{}", c.program_id, c.operator));
        }
        *per_op.entry(c.operator).or_default() += 1;
    }
    check(broken.is_empty(), || {
        format!("verify_spc false for {broken:?}")
    })?;
    check(per_op.len() == 9, || {
        format!("only {} SPC operators applied", per_op.len())
    })?;
    within(started, Duration::from_secs(300))?;
    Ok(format!(
        "{} of {} applicable cases neutral across 9 operators",
        jobs.len(),
        jobs.len()
    ))
}

/// Executor answering single-case runs on the original from a table.
struct TableExecutor(BTreeMap<String, TestStatus>);

impl Executor for TableExecutor {
    fn run_suite(&self, _: &Path, _: &TestSuite) -> Result<ExecutionReport, ExecError> {
        unreachable!("attribution only runs single cases")
    }

    fn run_single(&self, _: &Path, _: &TestSuite, case: &str) -> Result<TestVerdict, ExecError> {
        let status = *self
            .0
            .get(case)
            .ok_or_else(|| ExecError::UnknownCase(case.into()))?;
        Ok(TestVerdict {
            case_name: case.into(),
            status,
            message: String::new(),
            covered_lines: BTreeSet::new(),
            partial_coverage: false,
        })
    }

    fn run_program(&self, _: &Path, _: &str, _: Duration) -> Result<ProgramOutput, ExecError> {
        unreachable!()
    }

    fn check_suite(&self, _: &TestSuite) -> Result<(), String> {
        Ok(())
    }
}

// 4. Attribution on synthetic (fails, passes-on-original, covers) fixtures.
/// (case, status on mutant, lines covered on mutant, status alone on original, expected)
type AttributionRow = (
    &'static str,
    TestStatus,
    &'static [u32],
    TestStatus,
    Option<Classification>,
);

fn attribution() -> Outcome {
    use Classification::*;
    use TestStatus::*;
    let source = "n = int(input())\nfor i in range(n):\n    print(i)\nprint(\"done\")\n";
    let change = first_change("synthetic", source, OperatorId::BoundaryShift, 0)
        .map_err(|e| e.to_string())?
        .ok_or("BoundaryShift does not apply")?;
    check(change.mutated_region == BTreeSet::from([2]), || {
        format!("{:?}", change.mutated_region)
    })?;

    let table: [AttributionRow; 12] = [
        (
            "fail_pass_cover",
            Fail,
            &[1, 2, 3],
            Pass,
            Some(ResiduallyAligned),
        ),
        ("fail_pass_nocover", Fail, &[1], Pass, Some(UnrelatedPath)),
        ("fail_fail_cover", Fail, &[2], Fail, Some(Malformed)),
        ("fail_fail_nocover", Fail, &[], Fail, Some(Malformed)),
        (
            "error_pass_cover",
            Error,
            &[1, 2],
            Pass,
            Some(ResiduallyAligned),
        ),
        (
            "timeout_pass_cover",
            Timeout,
            &[2],
            Pass,
            Some(ResiduallyAligned),
        ),
        (
            "timeout_pass_nocover",
            Timeout,
            &[],
            Pass,
            Some(UnrelatedPath),
        ),
        ("fail_error_cover", Fail, &[2], Error, Some(Malformed)),
        ("fail_timeout_nocover", Fail, &[1], Timeout, Some(Malformed)),
        ("pass_pass_cover", Pass, &[2], Pass, None),
        ("pass_fail_cover", Pass, &[1, 2], Fail, None),
        (
            "fail_pass_after_region",
            Fail,
            &[1, 4],
            Pass,
            Some(UnrelatedPath),
        ),
    ];
    let verdicts = table
        .iter()
        .map(|(name, status, lines, _, _)| TestVerdict {
            case_name: name.to_string(),
            status: *status,
            message: String::new(),
            covered_lines: lines.iter().copied().collect(),
            partial_coverage: false,
        })
        .collect();
    let report = ExecutionReport::new("mutant", "suite", verdicts, 0.0, 0.0, BTreeSet::new());
    let original = TableExecutor(
        table
            .iter()
            .map(|(n, _, _, o, _)| (n.to_string(), *o))
            .collect(),
    );
    let suite = TestSuite {
        suite_source: String::new(),
        cases: table
            .iter()
            .map(|(n, ..)| testdrift::generation::TestCase {
                name: n.to_string(),
                body_span: (0, 0),
            })
            .collect(),
        program_id: "synthetic".into(),
        variant_label: VariantLabel::Mutant(OperatorId::BoundaryShift),
    };
    let records = attribute_failures(
        &change,
        &report,
        Path::new("original.py"),
        &suite,
        &original,
    )
    .map_err(|e| e.to_string())?;
    let got: BTreeMap<&str, Classification> = records
        .iter()
        .map(|r| (r.case_name.as_str(), r.classification))
        .collect();
    let errors: Vec<String> = table
        .iter()
        .filter(|(name, .., want)| got.get(name).copied() != *want)
        .map(|(name, .., want)| format!("{name}: want {want:?}, got {:?}", got.get(name)))
        .collect();
    check(errors.is_empty(), || errors.join("; "))?;
    Ok(format!("{} fixtures, 0 errors", table.len()))
}

fn synthetic_report(profiles: &[(String, BTreeSet<u32>)]) -> ExecutionReport {
    let verdicts = profiles
        .iter()
        .map(|(name, lines)| TestVerdict {
            case_name: name.clone(),
            status: TestStatus::Pass,
            message: String::new(),
            covered_lines: lines.clone(),
            partial_coverage: false,
        })
        .collect();
    ExecutionReport::new("program", "suite", verdicts, 0.0, 0.0, BTreeSet::new())
}

/// Maximum bipartite matching over "equal coverage" edges (Kuhn's algorithm).
fn brute_force_matched(a: &[(String, BTreeSet<u32>)], b: &[(String, BTreeSet<u32>)]) -> usize {
    fn augment(
        i: usize,
        a: &[(String, BTreeSet<u32>)],
        b: &[(String, BTreeSet<u32>)],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..b.len() {
            if a[i].1 == b[j].1 && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, a, b, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; b.len()];
    (0..a.len())
        .filter(|&i| augment(i, a, b, &mut vec![false; b.len()], &mut owner))
        .count()
}

// 5. Churn: identity, brute-force agreement, conservation.
fn churn() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profile = |rng: &mut ChaCha8Rng| -> BTreeSet<u32> {
        (1..=6).filter(|_| rng.random_range(0..3) == 0).collect()
    };
    let trials = 500;
    for t in 0..trials {
        let n = rng.random_range(0..12);
        let m = rng.random_range(0..12);
        let a: Vec<_> = (0..n)
            .map(|i| (format!("test_a{i}"), profile(&mut rng)))
            .collect();
        let b: Vec<_> = (0..m)
            .map(|i| (format!("test_b{i}"), profile(&mut rng)))
            .collect();
        let (ra, rb) = (synthetic_report(&a), synthetic_report(&b));

        let same =
            match_tests(&ra, &ra, VariantLabel::Baseline, None).map_err(|e| e.to_string())?;
        check(
            same.matched == n && same.churn == 0 && (n == 0 || same.match_rate == 100.0),
            || format!("trial {t}: identity gave {same:?}"),
        )?;

        let r = match_tests(
            &ra,
            &rb,
            VariantLabel::Mutant(OperatorId::VoidCondition),
            None,
        )
        .map_err(|e| e.to_string())?;
        let want = brute_force_matched(&a, &b);
        check(r.matched == want, || {
            format!("trial {t}: matched {} but brute force {want}", r.matched)
        })?;
        for rep in [&same, &r] {
            check(
                rep.conserves()
                    && rep.matched + rep.lost == rep.baseline_size()
                    && rep.matched + rep.new == rep.variant_size()
                    && rep.churn == rep.new + rep.lost,
                || format!("trial {t}: conservation broken in {rep:?}"),
            )?;
        }
    }
    Ok(format!(
        "{trials} seeded trials: identity exact, matched equals brute force, conservation holds"
    ))
}

fn report_bytes(run_dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    [METRICS_CSV, ATTRIBUTION_CSV, CHURN_CSV]
        .into_iter()
        .map(|f| {
            let p = run_dir.join("report").join(f);
            std::fs::read(&p)
                .map(|b| (f.to_string(), b))
                .map_err(|e| format!("{}: {e}", p.display()))
        })
        .collect()
}

// 6. Replay determinism on the mini-corpus.
fn determinism() -> Outcome {
    let started = Instant::now();
    let config_path = support::fixtures().join("mini/testdrift.toml");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let config = RunConfig::load(&config_path).map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut run = Run::open(dir.path(), config).map_err(|e| e.to_string())?;
        run.run_all(false).map_err(|e| e.to_string())?;
        outputs.push(report_bytes(dir.path())?);
    }
    check(outputs[0] == outputs[1], || "the two runs differ".into())?;
    let expected = support::fixtures().join("mini/expected");
    for (name, bytes) in &outputs[0] {
        let golden = std::fs::read(expected.join(name)).map_err(|e| e.to_string())?;
        check(&golden == bytes, || {
            format!("{name} differs from the golden copy")
        })?;
    }
    within(started, Duration::from_secs(600))?;
    let digests: Vec<String> = outputs[0]
        .iter()
        .map(|(n, b)| format!("{n} {}", &sha256_hex(b)[..12]))
        .collect();
    Ok(format!(
        "byte-identical across runs and golden files: {}",
        digests.join(", ")
    ))
}

// 7. Stratification on seeded LOC multisets.
fn stratification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 1000;
    for t in 0..trials {
        let n = rng.random_range(BANDS..=120);
        let spread = rng.random_range(1..=60);
        let mut programs: Vec<SeedProgram> = (0..n)
            .map(|i| SeedProgram {
                id: format!("p{i:03}"),
                source_path: PathBuf::new(),
                loc: rng.random_range(1..=spread),
                stratum: None,
                entry_mode: EntryMode::StdinScript,
            })
            .collect();
        let a = stratify(&mut programs).map_err(|e| e.to_string())?;
        let sizes: Vec<usize> = a.members.iter().map(Vec::len).collect();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        check(hi - lo <= 1, || format!("trial {t}: band sizes {sizes:?}"))?;
        let mut union: Vec<&String> = a.members.iter().flatten().collect();
        union.sort();
        let mut input: Vec<&String> = programs.iter().map(|p| &p.id).collect();
        input.sort();
        check(union == input, || {
            format!("trial {t}: union of bands is not the input")
        })?;
    }
    Ok(format!(
        "{trials} seeded multisets, band sizes within 1, union equals input"
    ))
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let hash = std::fs::read(&p)
                    .map(|b| sha256_hex(&b))
                    .unwrap_or_default();
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), hash);
            }
        }
    }
    out
}

// 8. Sandbox kill latency and filesystem hygiene.
fn sandbox() -> Outcome {
    need_python()?;
    let limit = 2.0;
    let mut policy = support::policy(limit);
    policy.grace = 4.0;
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    policy.scratch_root = Some(scratch.path().to_path_buf());
    let exec = support::executor_with(policy);
    let budget = Duration::from_secs_f64(limit + 5.0);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sleeper = dir.path().join("sleeper.py");
    std::fs::write(&sleeper, "import time\ntime.sleep(120)\n").map_err(|e| e.to_string())?;
    let t = Instant::now();
    let out = exec
        .run_program(&sleeper, "", Duration::from_secs_f64(limit))
        .map_err(|e| e.to_string())?;
    let program_kill = t.elapsed();
    check(out.timed_out && program_kill <= budget, || {
        format!(
            "sleeping program: timed_out={} after {program_kill:.1?}",
            out.timed_out
        )
    })?;

    // A test that ignores the adapter's own alarm has to be killed by the sandbox.
    let stubborn = "import signal\nimport time\n\n\ndef test_sleeps():\n    signal.signal(signal.SIGALRM, signal.SIG_IGN)\n    time.sleep(120)\n";
    let suite = testdrift::generation::extract_tests(
        &format!("```python\n{stubborn}```\n"),
        "sleeper",
        VariantLabel::Baseline,
    )
    .map_err(|e| e.to_string())?;
    let t = Instant::now();
    let v = exec
        .run_single(&sleeper, &suite, "test_sleeps")
        .map_err(|e| e.to_string())?;
    let test_kill = t.elapsed();
    check(
        v.status == TestStatus::Timeout && test_kill <= budget,
        || format!("sleeping test: {:?} after {test_kill:.1?}", v.status),
    )?;

    // Full fixture run: every reference suite on its original, plus the
    // sleeper, must leave the fixtures and a canary directory untouched and
    // no scratch directories behind.
    let canary = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(canary.path().join("canary.txt"), "do not touch\n")
        .map_err(|e| e.to_string())?;
    let before = (snapshot(&support::fixtures()), snapshot(canary.path()));
    for (id, path, _) in support::corpus() {
        exec.run_suite(&path, &support::reference_suite(&id))
            .map_err(|e| e.to_string())?;
    }
    let after = (snapshot(&support::fixtures()), snapshot(canary.path()));
    check(before == after, || {
        "fixture or canary snapshot changed".into()
    })?;
    let leftovers = std::fs::read_dir(scratch.path())
        .map_err(|e| e.to_string())?
        .count();
    check(leftovers == 0, || {
        format!("{leftovers} scratch directories left behind")
    })?;
    Ok(format!(
        "program killed after {:.1} s, test after {:.1} s (limit {limit} s + 5 s), snapshots unchanged",
        program_kill.as_secs_f64(),
        test_kill.as_secs_f64()
    ))
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    // Only run when asked for by name or when the harness lists everything;
    // `--list` must print nothing for cargo's test discovery.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, Criterion); 8] = [
        ("motivating example", motivating_example),
        ("edit-size law", edit_size_law),
        ("SPC neutrality", spc_neutrality),
        ("attribution", attribution),
        ("churn", churn),
        ("replay determinism", determinism),
        ("stratification", stratification),
        ("sandbox", sandbox),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {} {name:<20} PASS  {detail} [{secs:.1} s]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name:<20} FAIL  {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
