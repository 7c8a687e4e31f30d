mod support;

use std::path::Path;

use testdrift::analysis::{AggregateRow, AttributionRecord};
use testdrift::mutation::{
    bundle_dir, first_change, read_bundle, OperatorId, DIFF_FILE, METADATA_FILE, MUTANT_FILE,
};
use testdrift::pipeline::{
    ChurnRow, MutantRecord, PipelineError, Run, RunConfig, Stage, ATTRIBUTION_CSV, CHURN_CSV,
    METRICS_CSV,
};

fn mini_config() -> RunConfig {
    RunConfig::load(&support::fixtures().join("mini/testdrift.toml")).unwrap()
}

fn open(dir: &Path) -> Run {
    Run::open(dir, mini_config()).unwrap()
}

#[test]
fn stages_refuse_to_run_before_their_inputs_exist() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = open(dir.path());
    let err = run.run_stage(Stage::Evaluate, false).unwrap_err();
    assert!(
        matches!(
            err,
            PipelineError::MissingStage {
                stage: Stage::Evaluate,
                missing: Stage::Ingest
            }
        ),
        "{err}"
    );
    assert_eq!(err.exit_code(), 2);
    assert!(err.hint().contains("testdrift ingest"));
}

#[test]
fn completed_stages_are_skipped_and_resumed_runs_match_straight_runs() {
    let straight = tempfile::tempdir().unwrap();
    let full = open(straight.path()).run_all(false).unwrap();

    let resumed = tempfile::tempdir().unwrap();
    {
        let mut run = open(resumed.path());
        run.run_stage(Stage::Ingest, false).unwrap();
        run.run_stage(Stage::Baseline, false).unwrap();
    }
    // A fresh process picks up where the last one stopped.
    let statuses = open(resumed.path()).run_all(false).unwrap();
    let actions: Vec<&str> = statuses.iter().map(|s| s.action).collect();
    assert_eq!(actions[..3], ["skipped", "skipped", "completed"]);
    let digests = |v: &[testdrift::pipeline::StageStatus]| {
        v.iter().map(|s| s.digest.clone()).collect::<Vec<_>>()
    };
    assert_eq!(digests(&statuses), digests(&full));

    let again = open(resumed.path())
        .run_stage(Stage::Mutate, false)
        .unwrap();
    assert_eq!(again.action, "skipped");
}

#[test]
fn forcing_a_stage_invalidates_its_dependents() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = open(dir.path());
    for stage in [Stage::Ingest, Stage::Baseline, Stage::Mutate] {
        run.run_stage(stage, false).unwrap();
    }
    let forced = run.run_stage(Stage::Baseline, true).unwrap();
    assert_eq!(forced.action, "completed");
    let err = run.run_stage(Stage::Generate, false).unwrap_err();
    assert!(
        matches!(
            err,
            PipelineError::MissingStage {
                missing: Stage::Mutate,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn edited_upstream_outputs_are_detected() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = open(dir.path());
    run.run_stage(Stage::Ingest, false).unwrap();
    run.run_stage(Stage::Baseline, false).unwrap();
    let program = dir.path().join("corpus/programs/caesar.py");
    std::fs::write(&program, "print('tampered')\n").unwrap();
    let err = run.run_stage(Stage::Mutate, false).unwrap_err();
    assert!(
        matches!(
            err,
            PipelineError::StaleUpstream {
                upstream: Stage::Ingest
            }
        ),
        "{err}"
    );
    assert!(err.to_string().contains("--force"));
}

#[test]
fn a_run_directory_is_bound_to_its_config() {
    let dir = tempfile::tempdir().unwrap();
    drop(open(dir.path()));
    let mut other = mini_config();
    other.seed += 1;
    let err = Run::open(dir.path(), other).err().expect("digest mismatch");
    assert!(matches!(err, PipelineError::Config(_)), "{err}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn a_run_directory_admits_one_process() {
    let dir = tempfile::tempdir().unwrap();
    let _held = open(dir.path());
    let err = Run::open(dir.path(), mini_config()).err().expect("locked");
    assert!(matches!(err, PipelineError::Locked(_)), "{err}");
}

#[test]
fn replay_misses_are_provider_failures() {
    let dir = tempfile::tempdir().unwrap();
    let empty = tempfile::tempdir().unwrap();
    let mut config = mini_config();
    config.cache.llm_dir = Some(empty.path().to_path_buf());
    let mut run = Run::open(dir.path(), config).unwrap();
    run.run_stage(Stage::Ingest, false).unwrap();
    let err = run.run_stage(Stage::Baseline, false).unwrap_err();
    assert!(matches!(err, PipelineError::Provider(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

fn round_trip<T>(path: &Path)
where
    T: serde::de::DeserializeOwned + serde::Serialize,
{
    let bytes = std::fs::read(path).unwrap();
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<T> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert!(!rows.is_empty(), "{}", path.display());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(&header).unwrap();
    for r in &rows {
        w.serialize(r).unwrap();
    }
    assert_eq!(
        w.into_inner().unwrap(),
        bytes,
        "{} does not round-trip",
        path.display()
    );
}

#[test]
fn report_tables_round_trip_and_bundles_follow_the_layout() {
    let dir = tempfile::tempdir().unwrap();
    open(dir.path()).run_all(false).unwrap();
    let report = dir.path().join("report");
    round_trip::<AggregateRow>(&report.join(METRICS_CSV));
    round_trip::<AttributionRecord>(&report.join(ATTRIBUTION_CSV));
    round_trip::<ChurnRow>(&report.join(CHURN_CSV));

    let summary = std::fs::read_to_string(report.join("summary.md")).unwrap();
    assert!(summary.contains("no data") || summary.contains('–'));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(report.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["stages"].as_object().unwrap().len(), 7);

    // Every applied operator has a bundle that reads back as the change the
    // library produces for the same program.
    let index: Vec<MutantRecord> =
        serde_json::from_slice(&std::fs::read(dir.path().join("mutants/index.json")).unwrap())
            .unwrap();
    let mut seen = 0;
    for rec in index.iter().filter(|r| r.lines_changed.is_some()) {
        let bundle = bundle_dir(&dir.path().join("mutants"), &rec.program_id, rec.operator);
        for f in [MUTANT_FILE, DIFF_FILE, METADATA_FILE] {
            assert!(bundle.join(f).is_file(), "{}/{f}", bundle.display());
        }
        let change = read_bundle(&bundle).unwrap();
        let src = std::fs::read_to_string(
            dir.path()
                .join("corpus/programs")
                .join(format!("{}.py", rec.program_id)),
        )
        .unwrap();
        let expected = first_change(&rec.program_id, &src, rec.operator, change.seed)
            .unwrap()
            .unwrap();
        assert_eq!(change, expected);
        seen += 1;
    }
    assert!(seen > 20);
    assert!(index
        .iter()
        .any(|r| r.operator == OperatorId::BoundaryShift));
}
