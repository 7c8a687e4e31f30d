//! Rebuild the bundled replay archives for the mini-corpus.
//!
//!     cargo run --example record_fixtures
//!
//! The "model" is scripted: it answers every prompt with the reference suite
//! of the corpus program the prompted code most resembles, i.e. it ignores
//! the change the way a residually aligned model would. A few programs get
//! scripted misbehaviour so that every branch of the pipeline shows up in
//! the report:
//!
//! - `word_frequency` (baseline): one wrong assertion, so the baseline is
//!   rejected and its band falls back to the next candidate.
//! - `fizzbuzz` with a non-ASCII comment: prose without code on both
//!   attempts, so generation fails.
//! - `caesar` with an extra defaulted parameter: an unparsable first answer,
//!   repaired on the second attempt.
//!
//! Executions go through the trace adapter in `fixtures/adapter` and are
//! recorded next to the model answers.

use std::path::{Path, PathBuf};

use testdrift::generation::{LlmClient, Prompt, Provider, ProviderError};
use testdrift::pipeline::{CacheModeConfig, Run, RunConfig};

struct ScriptedModel {
    /// `(id, source, reference suite)` of every corpus program.
    programs: Vec<(String, String, String)>,
}

fn prompted_program(prompt: &Prompt) -> &str {
    let start = prompt
        .user_text
        .rfind("Program:\n\n```python\n")
        .expect("prompt carries a program")
        + 20;
    let rest = &prompt.user_text[start..];
    &rest[..rest.find("\n```").unwrap_or(rest.len())]
}

impl ScriptedModel {
    fn closest(&self, code: &str) -> &(String, String, String) {
        // Character-level similarity survives renames that touch most lines.
        self.programs
            .iter()
            .map(|p| (similar::TextDiff::from_chars(p.1.as_str(), code).ratio(), p))
            .fold(
                None,
                |best: Option<(f32, &(String, String, String))>, (r, p)| match best {
                    Some((br, _)) if br >= r => best,
                    _ => Some((r, p)),
                },
            )
            .expect("non-empty corpus")
            .1
    }
}

impl Provider for ScriptedModel {
    fn provider_id(&self) -> &str {
        "fixture"
    }

    fn complete(
        &self,
        _model: &str,
        _temperature: f64,
        prompt: &Prompt,
    ) -> Result<String, ProviderError> {
        let code = prompted_program(prompt);
        let (id, source, suite) = self.closest(code);
        let original = code == source.trim_end_matches('\n');
        let fenced = |text: &str| format!("```python\n{text}```\n");
        Ok(match id.as_str() {
            "word_frequency" if original => fenced(&suite.replace("'a 2\\n'", "'b 2\\n'")),
            "fizzbuzz" if !code.is_ascii() => {
                "I am not able to write tests for this program.".to_string()
            }
            "caesar" if code.contains("=None") && prompt.attempt == 1 => {
                fenced("def test_shift(:\n    pass\n")
            }
            _ => fenced(suite),
        })
    }
}

fn clear(dir: &Path) -> std::io::Result<()> {
    if dir.exists() {
        std::fs::remove_dir_all(dir)?;
    }
    std::fs::create_dir_all(dir)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()?;
    let mut config = RunConfig::load(&fixtures.join("mini/testdrift.toml"))?;
    config.cache.mode = CacheModeConfig::Record;
    let llm_dir = config.llm_dir(Path::new("unused"));
    let exec_dir = config
        .execution_dir()
        .expect("mini config names an execution archive");
    clear(&llm_dir)?;
    clear(&exec_dir)?;

    let mut programs = Vec::new();
    for entry in std::fs::read_dir(config.corpus_path())? {
        let path: PathBuf = entry?.path();
        let id = path.file_stem().unwrap().to_string_lossy().into_owned();
        let suite_path = fixtures.join("suites").join(format!("{id}.py"));
        if let Ok(suite) = std::fs::read_to_string(&suite_path) {
            programs.push((id, std::fs::read_to_string(&path)?, suite));
        }
    }
    programs.sort();

    let model = ScriptedModel { programs };
    let client = LlmClient::record(
        Box::new(model),
        &config.provider.model,
        config.provider.temperature,
        &llm_dir,
    );
    let run_dir = tempfile::tempdir()?;
    let mut run = Run::open(run_dir.path(), config)?.with_client(client);
    for status in run.run_all(false)? {
        println!("{:<10} {}", status.stage, status.digest);
    }
    println!(
        "archives written to {} and {}",
        llm_dir.display(),
        exec_dir.display()
    );
    Ok(())
}
