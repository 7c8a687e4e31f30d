//! Resumable stages over a run directory.
//!
//! ```text
//! <run>/
//!   manifest.json            stage markers and content digests
//!   corpus/                  ingest: manifest.json, programs/<id>.py
//!   baseline/                baseline: selection.json, <id>/{suite,report,generation}.json
//!   mutants/<id>/<op>/       mutate: mutant.py, change.diff, metadata.json, verification.json
//!   generated/<id>/<op>/     generate: suite.json or failure.json, generation.json
//!   evaluation/<id>/<op>/    evaluate: report.json
//!   results/*.jsonl          raw per-variant records
//!   report/                  summary.md, metrics.csv, attribution.csv, churn.csv, manifest.json
//!   llm-cache/               default model-response archive
//! ```
//!
//! A stage writes into a hidden staging directory and renames it into place;
//! its marker is written to the manifest afterwards. Anything without a
//! marker is treated as absent and rebuilt.

mod config;
mod manifest;
mod report;
mod stages;

pub use config::{
    AdapterConfig, CacheConfig, CacheModeConfig, ProviderConfig, RunConfig, SandboxConfig,
};
pub use manifest::{RunManifest, Stage, StageRecord};
pub use report::{
    emit_report, ChurnRow, ReportFiles, ATTRIBUTION_CSV, CHURN_CSV, METRICS_COLUMNS, METRICS_CSV,
    SUMMARY_MD,
};
pub use stages::{
    BaselineOutcome, MutantRecord, MutantStatus, Selection, ATTRIBUTION_JSONL, CHURN_JSONL,
    EVALUATION_JSONL,
};

use std::fs::File;
use std::path::{Path, PathBuf};

use fs2::FileExt;
use serde::Serialize;

use crate::execution::{AdapterExecutor, ArchivedExecutor, Executor};
use crate::generation::{LlmClient, OpenAiProvider, ProviderError, Templates};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(
        "stage `{stage}` needs `{missing}` to have completed; run `testdrift {missing}` first"
    )]
    MissingStage { stage: Stage, missing: Stage },
    #[error("outputs of `{upstream}` changed since it completed; rerun it with `testdrift {upstream} --force`")]
    StaleUpstream { upstream: Stage },
    #[error("run directory {0} is in use by another process")]
    Locked(PathBuf),
    #[error("stage `{stage}` failed: {detail}")]
    Stage { stage: Stage, detail: String },
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit code: 1 usage/config, 2 stage failure, 3 provider failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Provider(_) => 3,
            _ => 2,
        }
    }

    /// What to do about it, in one line.
    pub fn hint(&self) -> String {
        match self {
            PipelineError::Config(_) => "fix the configuration file (see README, \"Configuration\") or point --config elsewhere".into(),
            PipelineError::MissingStage { missing, .. } => format!("run `testdrift {missing}` (or `testdrift run-all`)"),
            PipelineError::StaleUpstream { upstream } => format!("rerun `testdrift {upstream} --force`"),
            PipelineError::Locked(_) => "wait for the other process or use another --run directory".into(),
            PipelineError::Stage { .. } | PipelineError::Io { .. } => {
                "fix the cause and rerun the stage; completed stages are kept".into()
            }
            PipelineError::Provider(ProviderError::MissingKey(var)) => {
                format!("export {var}, or pass --replay DIR to answer from a recorded archive")
            }
            PipelineError::Provider(ProviderError::ReplayMiss(_)) => {
                "the archive lacks this request; record it with --record or check the model, templates and temperature".into()
            }
            PipelineError::Provider(_) => "check --provider / --model and the endpoint's status, then rerun".into(),
        }
    }

    fn stage(stage: Stage, detail: impl ToString) -> Self {
        PipelineError::Stage {
            stage,
            detail: detail.to_string(),
        }
    }
}

pub(crate) trait IoContext<T> {
    fn at(self, path: &Path) -> Result<T, PipelineError>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &Path) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// What a stage invocation did, for `--json` status output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageStatus {
    pub stage: Stage,
    /// `completed`, or `skipped` when the marker was already present.
    pub action: &'static str,
    pub digest: String,
}

/// Everything a stage needs: config, an exclusive hold on the run directory,
/// and the executor / model client built from the config.
pub struct Run {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub templates: Templates,
    pub manifest: RunManifest,
    executor: Box<dyn Executor>,
    client: Option<LlmClient>,
    _lock: File,
}

fn build_executor(config: &RunConfig) -> Box<dyn Executor> {
    let adapter = AdapterExecutor::new(
        config.adapter_command(),
        config.adapter.interpreter.clone(),
        config.sandbox.policy.clone(),
    );
    match (config.cache.mode, config.execution_dir()) {
        (CacheModeConfig::Replay, Some(dir)) => {
            Box::new(ArchivedExecutor::<AdapterExecutor>::replay(dir))
        }
        (CacheModeConfig::Record, Some(dir)) => Box::new(ArchivedExecutor::record(adapter, dir)),
        _ => Box::new(adapter),
    }
}

impl Run {
    /// Open (or create) the run directory and take its lock.
    pub fn open(dir: &Path, config: RunConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        std::fs::create_dir_all(dir).at(dir)?;
        let lock_path = dir.join(".lock");
        let lock = File::create(&lock_path).at(&lock_path)?;
        lock.try_lock_exclusive()
            .map_err(|_| PipelineError::Locked(dir.to_path_buf()))?;
        let templates = Templates::builtin();
        let manifest = RunManifest::open(dir, &config, &templates)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            executor: build_executor(&config),
            client: None,
            config,
            templates,
            manifest,
            _lock: lock,
        })
    }

    /// Replace the executor, e.g. with a test double.
    pub fn with_executor(mut self, executor: Box<dyn Executor>) -> Self {
        self.executor = executor;
        self
    }

    /// Replace the model client, e.g. with one around a stub provider.
    pub fn with_client(mut self, client: LlmClient) -> Self {
        self.client = Some(client);
        self
    }

    pub fn executor(&self) -> &dyn Executor {
        self.executor.as_ref()
    }

    /// Build the model client on first use, so stages that never call the
    /// model do not need an API key.
    fn prepare_client(&mut self) -> Result<(), PipelineError> {
        if self.client.is_none() {
            let p = &self.config.provider;
            let archive = self.config.llm_dir(&self.dir);
            let provider = || -> Result<Box<dyn crate::generation::Provider>, PipelineError> {
                let timeout = std::time::Duration::from_secs_f64(p.request_timeout);
                Ok(Box::new(OpenAiProvider::from_env(
                    &p.base_url,
                    &p.api_key_env,
                    p.retry.clone(),
                    timeout,
                )?))
            };
            let client = match self.config.cache.mode {
                CacheModeConfig::Replay => LlmClient::replay(&p.model, p.temperature, archive),
                CacheModeConfig::Record => {
                    LlmClient::record(provider()?, &p.model, p.temperature, archive)
                }
                CacheModeConfig::Live => LlmClient::live(provider()?, &p.model, p.temperature),
            };
            self.client = Some(client);
        }
        Ok(())
    }

    fn llm(&self) -> &LlmClient {
        self.client
            .as_ref()
            .expect("prepare_client runs before generation stages")
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.dir.join(rel)
    }

    /// Run one stage, honouring markers. `force` reruns a completed stage.
    pub fn run_stage(&mut self, stage: Stage, force: bool) -> Result<StageStatus, PipelineError> {
        for &up in stage.upstream() {
            if !self.manifest.is_complete(up) {
                return Err(PipelineError::MissingStage { stage, missing: up });
            }
            if self.manifest.stored_digest(up) != Some(&manifest::stage_digest(&self.dir, up)?) {
                return Err(PipelineError::StaleUpstream { upstream: up });
            }
        }
        if self.manifest.is_complete(stage) && !force {
            let digest = self
                .manifest
                .stored_digest(stage)
                .cloned()
                .unwrap_or_default();
            return Ok(StageStatus {
                stage,
                action: "skipped",
                digest,
            });
        }
        self.manifest.invalidate_from(stage);
        self.manifest.save(&self.dir)?;
        log::info!("stage {stage}: starting");
        match stage {
            Stage::Ingest => stages::ingest(self)?,
            Stage::Baseline => stages::baseline(self)?,
            Stage::Mutate => stages::mutate(self)?,
            Stage::Generate => stages::generate(self)?,
            Stage::Evaluate => stages::evaluate(self)?,
            Stage::Attribute => stages::attribute(self)?,
            Stage::Churn => stages::churn(self)?,
            Stage::Report => report::report_stage(self)?,
        }
        let digest = manifest::stage_digest(&self.dir, stage)?;
        self.manifest.complete(stage, digest.clone());
        self.manifest.save(&self.dir)?;
        log::info!("stage {stage}: done ({})", &digest[..12]);
        Ok(StageStatus {
            stage,
            action: "completed",
            digest,
        })
    }

    /// Every stage in order. `force` reruns all of them.
    pub fn run_all(&mut self, force: bool) -> Result<Vec<StageStatus>, PipelineError> {
        Stage::ALL
            .iter()
            .map(|&s| self.run_stage(s, force))
            .collect()
    }
}
