#![allow(dead_code)]

use std::path::{Path, PathBuf};

use testdrift::execution::{AdapterExecutor, SandboxPolicy};
use testdrift::generation::{extract_tests, TestSuite, VariantLabel};

pub fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

pub fn fixtures() -> PathBuf {
    workspace().join("fixtures")
}

pub fn adapter_script() -> PathBuf {
    fixtures().join("adapter/trace_adapter.py")
}

pub fn python_available() -> bool {
    std::process::Command::new("python3")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

pub fn policy(limit: f64) -> SandboxPolicy {
    SandboxPolicy {
        wall_clock_limit: limit,
        grace: 5.0,
        ..SandboxPolicy::default()
    }
}

pub fn executor_with(policy: SandboxPolicy) -> AdapterExecutor {
    AdapterExecutor::new(
        vec!["python3".into(), adapter_script().display().to_string()],
        vec!["python3".into()],
        policy,
    )
}

pub fn executor() -> AdapterExecutor {
    executor_with(policy(10.0))
}

/// `(id, path, source)` for every program of the fixture corpus, by id.
pub fn corpus() -> Vec<(String, PathBuf, String)> {
    let dir = fixtures().join("corpus");
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .expect("fixture corpus")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "py"))
        .map(|p| {
            let id = p.file_stem().unwrap().to_string_lossy().into_owned();
            let src = std::fs::read_to_string(&p).unwrap();
            (id, p, src)
        })
        .collect();
    out.sort();
    out
}

pub fn suite_from_file(path: &Path, program_id: &str, label: VariantLabel) -> TestSuite {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    extract_tests(&format!("```python\n{text}```\n"), program_id, label).expect("suite extracts")
}

pub fn reference_suite(program_id: &str) -> TestSuite {
    suite_from_file(
        &fixtures().join("suites").join(format!("{program_id}.py")),
        program_id,
        VariantLabel::Baseline,
    )
}
