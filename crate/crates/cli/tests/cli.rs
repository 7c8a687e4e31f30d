use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .unwrap()
}

fn testdrift(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_testdrift"))
        .args(args)
        .current_dir(cwd)
        .env_remove("OPENAI_API_KEY")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn mini() -> String {
    fixtures().join("mini/testdrift.toml").display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        testdrift(&["frobnicate"], tmp.path()).status.code(),
        Some(1)
    );
    assert_eq!(testdrift(&[], tmp.path()).status.code(), Some(1));
    let help = testdrift(&["--help"], tmp.path());
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in [
        "ingest",
        "baseline",
        "mutate",
        "generate",
        "evaluate",
        "attribute",
        "churn",
        "report",
        "run-all",
    ] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
}

#[test]
fn a_missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = testdrift(&["ingest"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("hint:"), "{}", stderr(&out));
}

#[test]
fn stages_out_of_order_exit_2_with_json_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = testdrift(
        &["--config", &mini(), "--run", "r", "--json", "evaluate"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(line["exit_code"], 2);
    assert!(line["hint"].as_str().unwrap().contains("testdrift ingest"));
}

#[test]
fn replayed_runs_need_no_key_and_write_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = testdrift(
        &["--config", &mini(), "--run", "r", "--json", "run-all"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<serde_json::Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l["action"] == "completed"));
    for f in [
        "summary.md",
        "metrics.csv",
        "attribution.csv",
        "churn.csv",
        "manifest.json",
    ] {
        assert!(tmp.path().join("r/report").join(f).is_file(), "{f}");
    }
    let metrics = std::fs::read(tmp.path().join("r/report/metrics.csv")).unwrap();
    assert_eq!(
        metrics,
        std::fs::read(fixtures().join("mini/expected/metrics.csv")).unwrap()
    );

    // Rerunning skips everything.
    let again = testdrift(&["--config", &mini(), "--run", "r", "run-all"], tmp.path());
    assert_eq!(again.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&again.stdout)
        .lines()
        .all(|l| l.contains("skipped")));
}

#[test]
fn live_runs_without_a_key_are_provider_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let config = std::fs::read_to_string(fixtures().join("mini/testdrift.toml"))
        .unwrap()
        .replace("mode = \"replay\"", "mode = \"live\"");
    let path = tmp.path().join("live.toml");
    // Keep relative paths working by pointing them at the fixture tree.
    let config = config
        .replace(
            "corpus_dir = \"corpus\"",
            &format!("corpus_dir = {:?}", fixtures().join("mini/corpus")),
        )
        .replace(
            "../adapter",
            &fixtures().join("adapter").display().to_string(),
        )
        .replace(
            "\"../llm-cache\"",
            &format!("{:?}", fixtures().join("llm-cache")),
        )
        .replace(
            "\"../exec-cache\"",
            &format!("{:?}", fixtures().join("exec-cache")),
        );
    std::fs::write(&path, config).unwrap();
    let out = testdrift(
        &["--config", path.to_str().unwrap(), "--run", "r", "run-all"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("OPENAI_API_KEY"), "{}", stderr(&out));

    // The same config answered from an archive needs no key.
    let replay = fixtures().join("llm-cache");
    let out = testdrift(
        &[
            "--config",
            path.to_str().unwrap(),
            "--run",
            "r2",
            "--replay",
            replay.to_str().unwrap(),
            "ingest",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}
