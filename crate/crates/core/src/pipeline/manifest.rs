use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IoContext, PipelineError, RunConfig};
use crate::generation::Templates;
use crate::util::{read_json, sha256_hex, write_json};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Baseline,
    Mutate,
    Generate,
    Evaluate,
    Attribute,
    Churn,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Baseline,
        Stage::Mutate,
        Stage::Generate,
        Stage::Evaluate,
        Stage::Attribute,
        Stage::Churn,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Baseline => "baseline",
            Stage::Mutate => "mutate",
            Stage::Generate => "generate",
            Stage::Evaluate => "evaluate",
            Stage::Attribute => "attribute",
            Stage::Churn => "churn",
            Stage::Report => "report",
        }
    }

    /// Stages whose outputs this one reads.
    pub fn upstream(self) -> &'static [Stage] {
        use Stage::*;
        match self {
            Ingest => &[],
            Baseline => &[Ingest],
            Mutate => &[Ingest, Baseline],
            Generate => &[Ingest, Baseline, Mutate],
            Evaluate => &[Ingest, Baseline, Mutate, Generate],
            Attribute => &[Ingest, Baseline, Mutate, Generate, Evaluate],
            Churn => &[Ingest, Baseline, Mutate, Generate, Evaluate],
            Report => &[
                Ingest, Baseline, Mutate, Generate, Evaluate, Attribute, Churn,
            ],
        }
    }

    /// Run-relative paths (files or directories) owned by this stage.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &["corpus"],
            Stage::Baseline => &["baseline"],
            Stage::Mutate => &["mutants"],
            Stage::Generate => &["generated"],
            Stage::Evaluate => &["evaluation", "results/evaluation.jsonl"],
            Stage::Attribute => &["results/attribution.jsonl"],
            Stage::Churn => &["results/churn.jsonl"],
            Stage::Report => &["report"],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config_digest: String,
    pub template_hash: String,
    pub config: serde_json::Value,
    pub stages: BTreeMap<Stage, StageRecord>,
}

/// Digest binding a run to its config. The cache section is left out: it
/// says where answers come from, not what they are, so a recorded run and
/// its replay share one identity.
pub fn config_digest(config: &RunConfig, templates: &Templates) -> String {
    let mut snapshot = config.snapshot();
    if let Some(obj) = snapshot.as_object_mut() {
        obj.remove("cache");
    }
    let canonical = serde_json::to_vec(&snapshot).expect("snapshot serialises");
    let mut bytes = templates.hash().into_bytes();
    bytes.extend_from_slice(&canonical);
    sha256_hex(&bytes)
}

impl RunManifest {
    pub fn new(config: &RunConfig, templates: &Templates) -> Self {
        let config_digest = config_digest(config, templates);
        let mut snapshot = config.snapshot();
        if let Some(obj) = snapshot.as_object_mut() {
            obj.remove("cache");
        }
        Self {
            run_id: config_digest[..16].to_string(),
            config_digest,
            template_hash: templates.hash(),
            config: snapshot,
            stages: BTreeMap::new(),
        }
    }

    /// Load the manifest of an existing run, or start a fresh one. A run
    /// directory is bound to the config it was created with.
    pub fn open(
        dir: &Path,
        config: &RunConfig,
        templates: &Templates,
    ) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let fresh = Self::new(config, templates);
        if !path.exists() {
            fresh.save(dir)?;
            return Ok(fresh);
        }
        let existing: RunManifest = read_json(&path).at(&path)?;
        if existing.config_digest != fresh.config_digest {
            return Err(PipelineError::Config(format!(
                "{} was created with a different configuration (run {}); use a new --run directory",
                dir.display(),
                existing.run_id
            )));
        }
        Ok(existing)
    }

    pub fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        write_json(&path, self).at(&path)
    }

    pub fn is_complete(&self, stage: Stage) -> bool {
        self.stages.contains_key(&stage)
    }

    pub fn stored_digest(&self, stage: Stage) -> Option<&String> {
        self.stages.get(&stage).map(|r| &r.digest)
    }

    pub fn complete(&mut self, stage: Stage, digest: String) {
        self.stages.insert(stage, StageRecord { digest });
    }

    /// Drop the markers of `stage` and of everything that reads from it.
    pub fn invalidate_from(&mut self, stage: Stage) {
        self.stages
            .retain(|&s, _| s != stage && !s.upstream().contains(&stage));
    }

    /// Digest over all stage markers, embedded in reports.
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("manifest serialises"))
    }
}

fn collect_files(
    root: &Path,
    rel: &Path,
    out: &mut Vec<(PathBuf, PathBuf)>,
) -> std::io::Result<()> {
    let path = root.join(rel);
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(&path)?.collect::<Result<_, _>>()?;
        entries.sort_by_key(|e| e.file_name());
        for e in entries {
            collect_files(root, &rel.join(e.file_name()), out)?;
        }
    } else if path.is_file() {
        out.push((rel.to_path_buf(), path));
    }
    Ok(())
}

/// Content digest over a stage's outputs: relative paths and file hashes,
/// in path order.
pub fn stage_digest(dir: &Path, stage: Stage) -> Result<String, PipelineError> {
    let mut files = Vec::new();
    for out in stage.outputs() {
        collect_files(dir, Path::new(out), &mut files).at(&dir.join(out))?;
    }
    let mut listing = String::new();
    for (rel, path) in files {
        let bytes = std::fs::read(&path).at(&path)?;
        listing.push_str(&format!(
            "{}  {}\n",
            sha256_hex(&bytes),
            rel.to_string_lossy().replace('\\', "/")
        ));
    }
    Ok(sha256_hex(listing.as_bytes()))
}
