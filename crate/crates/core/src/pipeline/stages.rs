use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{IoContext, PipelineError, Run, Stage};
use crate::analysis::{
    accept_baseline, attribute_failures, match_tests, AttributionRecord, ChurnReport,
    EvaluationRecord, FailureBucket, Metrics, VariantStatus,
};
use crate::corpus::{
    self, CorpusManifest, SeedProgram, SelectionQuota, Selector, StrataAssignment, BANDS,
};
use crate::execution::ExecutionReport;
use crate::generation::{
    generate_with_repair, GenerationFailure, GenerationRecord, TestSuite, VariantLabel,
};
use crate::mutation::{
    self, bundle_dir, input_pool, read_bundle, verify_sac, verify_spc, write_bundle, Category,
    OperatorId, SacVerdict,
};
use crate::par;
use crate::util::{read_json, read_json_lines, to_json_lines, write_atomic, write_json};

const CORPUS_MANIFEST: &str = "corpus/manifest.json";
const SELECTION: &str = "baseline/selection.json";
const MUTANT_INDEX: &str = "mutants/index.json";
const GENERATED_INDEX: &str = "generated/index.json";
pub const EVALUATION_JSONL: &str = "results/evaluation.jsonl";
pub const ATTRIBUTION_JSONL: &str = "results/attribution.jsonl";
pub const CHURN_JSONL: &str = "results/churn.jsonl";

/// A stage's output directory under construction. Dropped without
/// `commit`, it leaves nothing visible.
struct Staging {
    tmp: PathBuf,
    dest: PathBuf,
}

impl Staging {
    fn begin(run: &Run, name: &str) -> Result<Self, PipelineError> {
        let tmp = run.path(format!(".{name}.partial"));
        if tmp.exists() {
            std::fs::remove_dir_all(&tmp).at(&tmp)?;
        }
        std::fs::create_dir_all(&tmp).at(&tmp)?;
        Ok(Self {
            tmp,
            dest: run.path(name),
        })
    }

    fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.tmp.join(rel)
    }

    fn write_json<T: Serialize>(
        &self,
        rel: impl AsRef<Path>,
        value: &T,
    ) -> Result<(), PipelineError> {
        let path = self.path(rel);
        write_json(&path, value).at(&path)
    }

    fn commit(self) -> Result<(), PipelineError> {
        if self.dest.exists() {
            std::fs::remove_dir_all(&self.dest).at(&self.dest)?;
        }
        std::fs::rename(&self.tmp, &self.dest).at(&self.dest)
    }
}

fn load<T: serde::de::DeserializeOwned>(
    run: &Run,
    rel: impl AsRef<Path>,
) -> Result<T, PipelineError> {
    let path = run.path(rel);
    read_json(&path).at(&path)
}

fn load_lines<T: serde::de::DeserializeOwned>(
    run: &Run,
    rel: &str,
) -> Result<Vec<T>, PipelineError> {
    let path = run.path(rel);
    read_json_lines(&path).at(&path)
}

fn write_lines<T: Serialize>(run: &Run, rel: &str, items: &[T]) -> Result<(), PipelineError> {
    let path = run.path(rel);
    write_atomic(&path, &to_json_lines(items)).at(&path)
}

fn program_path(id: &str) -> PathBuf {
    Path::new("corpus/programs").join(format!("{id}.py"))
}

// ---------------------------------------------------------------- ingest

pub(super) fn ingest(run: &mut Run) -> Result<(), PipelineError> {
    let config = &run.config;
    let corpus_dir = config.corpus_path();
    let limit = Duration::from_secs_f64(config.sandbox.program_limit);
    let ingested = corpus::ingest(
        &corpus_dir,
        config.language,
        run.executor(),
        limit,
        config.parallelism,
    )
    .map_err(|e| PipelineError::stage(Stage::Ingest, e))?;
    let mut programs = ingested.programs;
    let assignment =
        corpus::stratify(&mut programs).map_err(|e| PipelineError::stage(Stage::Ingest, e))?;

    let staging = Staging::begin(run, "corpus")?;
    for p in programs.iter_mut() {
        let source = p.source().at(&p.source_path)?;
        let rel = program_path(&p.id);
        let dest = run.path(&rel);
        let staged = staging.path(
            dest.strip_prefix(run.path("corpus"))
                .expect("under corpus/"),
        );
        write_atomic(&staged, source.as_bytes()).at(&staged)?;
        p.source_path = rel;
    }
    let rejections = ingested
        .rejections
        .into_iter()
        .map(|mut r| {
            r.path = r
                .path
                .strip_prefix(&corpus_dir)
                .map(Path::to_path_buf)
                .unwrap_or(r.path);
            r
        })
        .collect();
    let manifest = CorpusManifest {
        language: config.language,
        programs,
        boundaries: assignment.boundaries,
        rejections,
    };
    staging.write_json("manifest.json", &manifest)?;
    staging.commit()
}

fn strata_of(programs: &[SeedProgram], boundaries: [usize; 3]) -> StrataAssignment {
    let mut members: [Vec<String>; BANDS] = Default::default();
    for p in programs {
        members[p.stratum.unwrap_or(0) as usize].push(p.id.clone());
    }
    for m in &mut members {
        m.sort();
    }
    StrataAssignment {
        boundaries,
        members,
    }
}

// -------------------------------------------------------------- baseline

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    pub program_id: String,
    pub band: usize,
    pub accepted: bool,
    pub bucket: Option<FailureBucket>,
    pub metrics: Option<Metrics>,
    pub generation_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub quota: SelectionQuota,
    /// Accepted programs, sorted by id.
    pub selected: Vec<String>,
    /// Bands that ran out of candidates before reaching the target.
    pub short_bands: Vec<usize>,
    /// Every attempted candidate, sorted by id.
    pub outcomes: Vec<BaselineOutcome>,
}

struct BaselineAttempt {
    outcome: BaselineOutcome,
    suite: Option<TestSuite>,
    report: Option<ExecutionReport>,
    records: Vec<GenerationRecord>,
    failure: Option<GenerationFailure>,
}

fn attempt_baseline(
    run: &Run,
    band: usize,
    program: &SeedProgram,
) -> Result<BaselineAttempt, PipelineError> {
    let path = run.path(&program.source_path);
    let source = std::fs::read_to_string(&path).at(&path)?;
    let generation = generate_with_repair(
        run.llm(),
        run.executor(),
        &run.templates,
        &program.id,
        VariantLabel::Baseline,
        &source,
    )?;
    let mut outcome = BaselineOutcome {
        program_id: program.id.clone(),
        band,
        accepted: false,
        bucket: None,
        metrics: None,
        generation_error: None,
    };
    match generation.suite {
        Ok(suite) => {
            let report = run.executor().run_suite(&path, &suite).map_err(|e| {
                PipelineError::stage(Stage::Baseline, format!("{}: {e}", program.id))
            })?;
            let decision = accept_baseline(&report);
            outcome.accepted = decision.accepted;
            outcome.bucket = decision.bucket;
            outcome.metrics = Some(Metrics::of(&report));
            Ok(BaselineAttempt {
                outcome,
                suite: Some(suite),
                report: Some(report),
                records: generation.records,
                failure: None,
            })
        }
        Err(failure) => {
            outcome.bucket = Some(FailureBucket::SyntacticEnvironmental);
            outcome.generation_error = Some(failure.last_error.clone());
            Ok(BaselineAttempt {
                outcome,
                suite: None,
                report: None,
                records: generation.records,
                failure: Some(failure),
            })
        }
    }
}

pub(super) fn baseline(run: &mut Run) -> Result<(), PipelineError> {
    run.prepare_client()?;
    let run = &*run;
    let corpus: CorpusManifest = load(run, CORPUS_MANIFEST)?;
    let assignment = strata_of(&corpus.programs, corpus.boundaries);
    let mut selector = Selector::new(
        &corpus.programs,
        &assignment,
        SelectionQuota::new(run.config.per_band_target),
    );
    let staging = Staging::begin(run, "baseline")?;
    let mut outcomes = Vec::new();
    loop {
        let batch = selector.next_batch();
        if batch.is_empty() {
            break;
        }
        let attempts = par::map(run.config.parallelism, &batch, |(band, p)| {
            attempt_baseline(run, *band, p)
        });
        for attempt in attempts {
            let a = attempt?;
            let id = a.outcome.program_id.clone();
            selector.record(a.outcome.band, a.outcome.accepted);
            staging.write_json(Path::new(&id).join("generation.json"), &a.records)?;
            if let Some(suite) = &a.suite {
                staging.write_json(Path::new(&id).join("suite.json"), suite)?;
            }
            if let Some(report) = &a.report {
                staging.write_json(Path::new(&id).join("report.json"), report)?;
            }
            if let Some(failure) = &a.failure {
                staging.write_json(Path::new(&id).join("failure.json"), failure)?;
            }
            outcomes.push(a.outcome);
        }
    }
    outcomes.sort_by(|a, b| a.program_id.cmp(&b.program_id));
    let short_bands = selector.short_bands();
    for b in &short_bands {
        log::warn!(
            "band {b} reached {} of {} passing programs",
            selector.quota.passed_per_band[*b],
            selector.quota.per_band_target
        );
    }
    let selection = Selection {
        selected: outcomes
            .iter()
            .filter(|o| o.accepted)
            .map(|o| o.program_id.clone())
            .collect(),
        quota: selector.quota,
        short_bands,
        outcomes,
    };
    staging.write_json("selection.json", &selection)?;
    staging.commit()
}

// ---------------------------------------------------------------- mutate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutantStatus {
    /// The operator has no site in this program.
    NotApplicable,
    /// SAC with a behavioural witness.
    Diverging,
    /// SAC the screen could not tell apart from the original.
    PossiblyEquivalent,
    /// SPC that keeps the baseline suite green.
    SpcVerified,
    /// SPC that broke a baseline test.
    SpcRejected,
}

impl MutantStatus {
    /// Whether the variant goes on to suite generation.
    pub fn usable(self) -> bool {
        matches!(self, MutantStatus::Diverging | MutantStatus::SpcVerified)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub program_id: String,
    pub operator: OperatorId,
    pub status: MutantStatus,
    pub lines_changed: Option<u32>,
    pub sac_verdict: Option<SacVerdict>,
}

fn baseline_suite(run: &Run, id: &str) -> Result<TestSuite, PipelineError> {
    load(run, Path::new("baseline").join(id).join("suite.json"))
}

fn baseline_report(run: &Run, id: &str) -> Result<ExecutionReport, PipelineError> {
    load(run, Path::new("baseline").join(id).join("report.json"))
}

pub(super) fn mutate(run: &mut Run) -> Result<(), PipelineError> {
    let run = &*run;
    let selection: Selection = load(run, SELECTION)?;
    let jobs: Vec<(String, OperatorId)> = selection
        .selected
        .iter()
        .flat_map(|id| {
            OperatorId::ALL
                .into_iter()
                .filter(|op| run.config.operators.contains(op))
                .map(move |op| (id.clone(), op))
        })
        .collect();
    let staging = Staging::begin(run, "mutants")?;
    let pool = input_pool(run.config.seed);
    let limit = Duration::from_secs_f64(run.config.sandbox.program_limit);
    let fail = |e: String| PipelineError::stage(Stage::Mutate, e);

    let results = par::map(run.config.parallelism, &jobs, |(id, op)| {
        let original_path = run.path(program_path(id));
        let source = std::fs::read_to_string(&original_path).at(&original_path)?;
        let change = match mutation::first_change(id, &source, *op, run.config.seed) {
            Ok(Some(c)) => c,
            Ok(None) => {
                return Ok((
                    None,
                    MutantRecord::bare(id, *op, MutantStatus::NotApplicable),
                ))
            }
            Err(e) => return Err(fail(format!("{id}/{}: {e}", op.name()))),
        };
        let suite = baseline_suite(run, id)?;
        let mut record = MutantRecord::bare(id, *op, MutantStatus::NotApplicable);
        record.lines_changed = Some(change.lines_changed);
        match change.category {
            Category::Sac => {
                let verdict = verify_sac(
                    &change,
                    &original_path,
                    &suite,
                    &pool,
                    run.executor(),
                    limit,
                )
                .map_err(|e| fail(format!("{id}/{}: {e}", op.name())))?;
                record.status = if verdict.is_diverging() {
                    MutantStatus::Diverging
                } else {
                    MutantStatus::PossiblyEquivalent
                };
                record.sac_verdict = Some(verdict);
            }
            Category::Spc => {
                let ok = verify_spc(&change, &suite, run.executor())
                    .map_err(|e| fail(format!("{id}/{}: {e}", op.name())))?;
                record.status = if ok {
                    MutantStatus::SpcVerified
                } else {
                    MutantStatus::SpcRejected
                };
            }
        }
        Ok((Some((source, change)), record))
    });

    let mut index = Vec::new();
    for r in results {
        let (change, record) = r?;
        if let Some((source, change)) = change {
            let dir = write_bundle(&staging.tmp, &source, &change).at(&staging.tmp)?;
            write_json(&dir.join("verification.json"), &record).at(&dir)?;
        }
        index.push(record);
    }
    staging.write_json("index.json", &index)?;
    staging.commit()
}

impl MutantRecord {
    fn bare(id: &str, operator: OperatorId, status: MutantStatus) -> Self {
        Self {
            program_id: id.to_string(),
            operator,
            status,
            lines_changed: None,
            sac_verdict: None,
        }
    }
}

// -------------------------------------------------------------- generate

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GeneratedEntry {
    program_id: String,
    operator: OperatorId,
    generated: bool,
}

fn variant_rel(root: &str, id: &str, op: OperatorId) -> PathBuf {
    bundle_dir(Path::new(root), id, op)
}

pub(super) fn generate(run: &mut Run) -> Result<(), PipelineError> {
    run.prepare_client()?;
    let run = &*run;
    let mutants: Vec<MutantRecord> = load(run, MUTANT_INDEX)?;
    let usable: Vec<&MutantRecord> = mutants.iter().filter(|m| m.status.usable()).collect();
    let staging = Staging::begin(run, "generated")?;
    let generations = par::map(run.config.parallelism, &usable, |m| {
        let path = run
            .path(variant_rel("mutants", &m.program_id, m.operator))
            .join(mutation::MUTANT_FILE);
        let source = std::fs::read_to_string(&path).at(&path)?;
        Ok::<_, PipelineError>(generate_with_repair(
            run.llm(),
            run.executor(),
            &run.templates,
            &m.program_id,
            VariantLabel::Mutant(m.operator),
            &source,
        )?)
    });
    let mut index = Vec::new();
    for (m, generation) in usable.iter().zip(generations) {
        let generation = generation?;
        let dir = bundle_dir(Path::new(""), &m.program_id, m.operator);
        staging.write_json(dir.join("generation.json"), &generation.records)?;
        match &generation.suite {
            Ok(suite) => staging.write_json(dir.join("suite.json"), suite)?,
            Err(failure) => staging.write_json(dir.join("failure.json"), failure)?,
        }
        index.push(GeneratedEntry {
            program_id: m.program_id.clone(),
            operator: m.operator,
            generated: generation.suite.is_ok(),
        });
    }
    staging.write_json("index.json", &index)?;
    staging.commit()
}

// -------------------------------------------------------------- evaluate

pub(super) fn evaluate(run: &mut Run) -> Result<(), PipelineError> {
    let run = &*run;
    let corpus: CorpusManifest = load(run, CORPUS_MANIFEST)?;
    let selection: Selection = load(run, SELECTION)?;
    let mutants: Vec<MutantRecord> = load(run, MUTANT_INDEX)?;
    let generated: Vec<GeneratedEntry> = load(run, GENERATED_INDEX)?;
    let stratum = |id: &str| {
        corpus
            .programs
            .iter()
            .find(|p| p.id == id)
            .and_then(|p| p.stratum)
    };
    let record = |id: &str, label, status, metrics, lines_changed, bucket| EvaluationRecord {
        program_id: id.to_string(),
        stratum: stratum(id),
        model: run.config.provider.model.clone(),
        language: run.config.language,
        variant_label: label,
        status,
        metrics,
        lines_changed,
        bucket,
    };

    let staging = Staging::begin(run, "evaluation")?;
    let runnable: Vec<&GeneratedEntry> = generated.iter().filter(|g| g.generated).collect();
    let reports = par::map(run.config.parallelism, &runnable, |g| {
        let suite: TestSuite = load(
            run,
            variant_rel("generated", &g.program_id, g.operator).join("suite.json"),
        )?;
        let mutant = run
            .path(variant_rel("mutants", &g.program_id, g.operator))
            .join(mutation::MUTANT_FILE);
        run.executor().run_suite(&mutant, &suite).map_err(|e| {
            PipelineError::stage(
                Stage::Evaluate,
                format!("{}/{}: {e}", g.program_id, g.operator.name()),
            )
        })
    });
    let mut evaluated = std::collections::BTreeMap::new();
    for (g, report) in runnable.iter().zip(reports) {
        let report = report?;
        staging.write_json(
            bundle_dir(Path::new(""), &g.program_id, g.operator).join("report.json"),
            &report,
        )?;
        evaluated.insert((g.program_id.clone(), g.operator), Metrics::of(&report));
    }

    let mut records = Vec::new();
    for o in &selection.outcomes {
        let status = if o.accepted {
            VariantStatus::Evaluated
        } else {
            VariantStatus::BaselineRejected
        };
        records.push(record(
            &o.program_id,
            VariantLabel::Baseline,
            status,
            o.metrics,
            None,
            o.bucket,
        ));
    }
    for m in &mutants {
        let label = VariantLabel::Mutant(m.operator);
        let (status, metrics, bucket) = match m.status {
            MutantStatus::NotApplicable => continue,
            MutantStatus::PossiblyEquivalent => (VariantStatus::PossiblyEquivalent, None, None),
            MutantStatus::SpcRejected => (VariantStatus::SpcRejected, None, None),
            MutantStatus::Diverging | MutantStatus::SpcVerified => {
                match evaluated.get(&(m.program_id.clone(), m.operator)) {
                    Some(metrics) => (VariantStatus::Evaluated, Some(*metrics), None),
                    None => (
                        VariantStatus::GenerationFailed,
                        None,
                        Some(FailureBucket::SyntacticEnvironmental),
                    ),
                }
            }
        };
        records.push(record(
            &m.program_id,
            label,
            status,
            metrics,
            m.lines_changed,
            bucket,
        ));
    }
    records.sort_by(|a, b| (&a.program_id, a.variant_label).cmp(&(&b.program_id, b.variant_label)));
    staging.commit()?;
    write_lines(run, EVALUATION_JSONL, &records)
}

fn evaluated_mutants(run: &Run) -> Result<Vec<EvaluationRecord>, PipelineError> {
    let records: Vec<EvaluationRecord> = load_lines(run, EVALUATION_JSONL)?;
    Ok(records
        .into_iter()
        .filter(|r| {
            r.status == VariantStatus::Evaluated && r.variant_label != VariantLabel::Baseline
        })
        .collect())
}

struct Variant {
    change: mutation::CodeChange,
    suite: TestSuite,
    report: ExecutionReport,
}

fn load_variant(run: &Run, id: &str, op: OperatorId) -> Result<Variant, PipelineError> {
    let bundle = run.path(variant_rel("mutants", id, op));
    Ok(Variant {
        change: read_bundle(&bundle).at(&bundle)?,
        suite: load(run, variant_rel("generated", id, op).join("suite.json"))?,
        report: load(run, variant_rel("evaluation", id, op).join("report.json"))?,
    })
}

// ------------------------------------------------------------- attribute

pub(super) fn attribute(run: &mut Run) -> Result<(), PipelineError> {
    let run = &*run;
    let sacs: Vec<EvaluationRecord> = evaluated_mutants(run)?
        .into_iter()
        .filter(|r| r.variant_label.category() == Some(Category::Sac))
        .collect();
    let per_variant = par::map(run.config.parallelism, &sacs, |r| {
        let op = r.variant_label.operator().expect("mutant label");
        let v = load_variant(run, &r.program_id, op)?;
        let original = run.path(program_path(&r.program_id));
        attribute_failures(&v.change, &v.report, &original, &v.suite, run.executor()).map_err(|e| {
            PipelineError::stage(
                Stage::Attribute,
                format!("{}/{}: {e}", r.program_id, op.name()),
            )
        })
    });
    let mut records: Vec<AttributionRecord> = Vec::new();
    for r in per_variant {
        records.extend(r?);
    }
    write_lines(run, ATTRIBUTION_JSONL, &records)
}

// ----------------------------------------------------------------- churn

pub(super) fn churn(run: &mut Run) -> Result<(), PipelineError> {
    let run = &*run;
    let variants = evaluated_mutants(run)?;
    let reports = par::map(run.config.parallelism, &variants, |r| {
        let op = r.variant_label.operator().expect("mutant label");
        let v = load_variant(run, &r.program_id, op)?;
        let baseline = baseline_report(run, &r.program_id)?;
        let report =
            match_tests(&baseline, &v.report, r.variant_label, Some(&v.change)).map_err(|e| {
                PipelineError::stage(Stage::Churn, format!("{}/{}: {e}", r.program_id, op.name()))
            })?;
        if !report.conserves() {
            return Err(PipelineError::stage(
                Stage::Churn,
                format!("{}/{}: conservation violated", r.program_id, op.name()),
            ));
        }
        Ok(report)
    });
    let reports: Vec<ChurnReport> = reports.into_iter().collect::<Result<_, _>>()?;
    write_lines(run, CHURN_JSONL, &reports)
}
