use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::LanguageTag;
use crate::execution::SandboxPolicy;
use crate::generation::RetryPolicy;
use crate::mutation::OperatorId;
use crate::par::Parallelism;

/// Everything a run depends on. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    #[serde(default = "default_language")]
    pub language: LanguageTag,
    #[serde(default = "default_per_band")]
    pub per_band_target: usize,
    #[serde(default = "all_operators")]
    pub operators: Vec<OperatorId>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub parallelism: Parallelism,
    #[serde(default)]
    pub sandbox: SandboxConfig,
    #[serde(default)]
    pub adapter: AdapterConfig,
    #[serde(default)]
    pub provider: ProviderConfig,
    #[serde(default)]
    pub cache: CacheConfig,
    /// Directory relative paths resolve against; not part of the snapshot,
    /// so the same config digests identically wherever it is checked out.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_language() -> LanguageTag {
    LanguageTag::Python
}

fn default_per_band() -> usize {
    25
}

fn all_operators() -> Vec<OperatorId> {
    OperatorId::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SandboxConfig {
    #[serde(flatten)]
    pub policy: SandboxPolicy,
    /// Wall-clock limit for ingestion smoke runs and differential runs.
    pub program_limit: f64,
}

impl Default for SandboxConfig {
    fn default() -> Self {
        Self {
            policy: SandboxPolicy::default(),
            program_limit: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdapterConfig {
    /// Adapter command line; the request arrives on its stdin.
    pub command: Vec<String>,
    /// Interpreter used to run programs directly.
    pub interpreter: Vec<String>,
}

impl Default for AdapterConfig {
    fn default() -> Self {
        Self {
            command: vec!["testdrift-adapter-python".into()],
            interpreter: vec!["python3".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub id: String,
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub request_timeout: f64,
    pub retry: RetryPolicy,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            id: "openai-compatible".into(),
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            temperature: 0.0,
            api_key_env: "OPENAI_API_KEY".into(),
            request_timeout: 120.0,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheModeConfig {
    #[default]
    Live,
    Record,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheConfig {
    pub mode: CacheModeConfig,
    /// Model-response archive; defaults to `<run>/llm-cache`.
    pub llm_dir: Option<PathBuf>,
    /// Execution archive. When set, executions are recorded there
    /// (`record`) or answered from it (`replay`).
    pub execution_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        config.validate()?;
        Ok(config)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.base_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.resolve(&self.corpus_dir)
    }

    pub fn llm_dir(&self, run_dir: &Path) -> PathBuf {
        self.cache
            .llm_dir
            .as_deref()
            .map_or_else(|| run_dir.join("llm-cache"), |p| self.resolve(p))
    }

    pub fn execution_dir(&self) -> Option<PathBuf> {
        self.cache.execution_dir.as_deref().map(|p| self.resolve(p))
    }

    /// Adapter argv with path-like arguments that exist next to the config
    /// made absolute, so a config can ship beside its adapter script.
    pub fn adapter_command(&self) -> Vec<String> {
        self.adapter
            .command
            .iter()
            .map(|arg| {
                let candidate = self.base_dir.join(arg);
                if arg.contains('/') && Path::new(arg).is_relative() && candidate.exists() {
                    candidate.display().to_string()
                } else {
                    arg.clone()
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.per_band_target == 0 {
            return bad("per_band_target must be at least 1");
        }
        if self.adapter.command.is_empty() || self.adapter.interpreter.is_empty() {
            return bad("adapter.command and adapter.interpreter must be non-empty");
        }
        if self.sandbox.policy.wall_clock_limit <= 0.0 || self.sandbox.program_limit <= 0.0 {
            return bad("sandbox limits must be positive");
        }
        if !(0.0..=2.0).contains(&self.provider.temperature) {
            return bad("provider.temperature must be within [0, 2]");
        }
        let mut seen = std::collections::BTreeSet::new();
        if !self.operators.iter().all(|op| seen.insert(*op)) {
            return bad("operators must not repeat");
        }
        Ok(())
    }

    /// Canonical serialisation used for digests and the manifest snapshot.
    pub fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }
}
