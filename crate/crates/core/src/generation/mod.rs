//! Test-suite generation: prompts, model access, extraction and the
//! two-shot repair loop.

mod client;
mod extract;
mod prompt;
mod suite;

pub use client::{
    CacheMode, Exchange, LlmClient, OpenAiProvider, Provider, ProviderError, RetryPolicy,
};
pub use extract::{extract_tests, ExtractError};
pub use prompt::{build_prompt, Prompt, Templates};
pub use suite::{TestCase, TestSuite, VariantLabel};

use serde::{Deserialize, Serialize};

use crate::execution::Executor;

/// Provider calls allowed per (program, variant).
pub const REPAIR_BUDGET: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Extracted,
    RepairNeeded,
    Failed,
}

/// One provider exchange and what became of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub program_id: String,
    pub variant_label: VariantLabel,
    pub provider_id: String,
    pub model_name: String,
    pub temperature: f64,
    pub template_hash: String,
    pub request_digest: String,
    pub response_text: String,
    pub attempt: u8,
    pub timestamp: u64,
    pub outcome: Outcome,
    /// Extraction or collection error, when there was one.
    pub error: Option<String>,
}

/// Why a variant ended without a usable suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationFailure {
    pub program_id: String,
    pub variant_label: VariantLabel,
    pub attempts: u8,
    pub last_error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generation {
    pub suite: Result<TestSuite, GenerationFailure>,
    pub records: Vec<GenerationRecord>,
}

/// Ask for a suite, check it, and spend at most one repair attempt carrying
/// the first error back to the model. Each attempt is an independent request.
pub fn generate_with_repair<E: Executor + ?Sized>(
    client: &LlmClient,
    executor: &E,
    templates: &Templates,
    program_id: &str,
    variant_label: VariantLabel,
    program_source: &str,
) -> Result<Generation, ProviderError> {
    let template_hash = templates.hash();
    let mut records = Vec::new();
    let mut prior_error: Option<String> = None;
    for attempt in 1..=REPAIR_BUDGET {
        let prompt = build_prompt(templates, program_source, attempt, prior_error.as_deref());
        let exchange = client.complete(&prompt)?;
        let checked = extract_tests(&exchange.response_text, program_id, variant_label)
            .map_err(|e| e.to_string())
            .and_then(|suite| executor.check_suite(&suite).map(|()| suite));
        let (outcome, error) = match &checked {
            Ok(_) => (Outcome::Extracted, None),
            Err(e) if attempt < REPAIR_BUDGET => (Outcome::RepairNeeded, Some(e.clone())),
            Err(e) => (Outcome::Failed, Some(e.clone())),
        };
        records.push(GenerationRecord {
            program_id: program_id.to_string(),
            variant_label,
            provider_id: exchange.provider_id,
            model_name: exchange.model_name,
            temperature: exchange.temperature,
            template_hash: template_hash.clone(),
            request_digest: exchange.request_digest,
            response_text: exchange.response_text,
            attempt,
            timestamp: exchange.timestamp,
            outcome,
            error,
        });
        match checked {
            Ok(suite) => {
                return Ok(Generation {
                    suite: Ok(suite),
                    records,
                })
            }
            Err(e) => prior_error = Some(e),
        }
    }
    Ok(Generation {
        suite: Err(GenerationFailure {
            program_id: program_id.to_string(),
            variant_label,
            attempts: REPAIR_BUDGET,
            last_error: prior_error.unwrap_or_default(),
        }),
        records,
    })
}
