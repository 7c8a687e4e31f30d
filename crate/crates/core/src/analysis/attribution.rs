use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::execution::{covers_region, ExecError, ExecutionReport, Executor, Version};
use crate::generation::TestSuite;
use crate::mutation::{CodeChange, OperatorId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// Fails on the mutant, passes on the original and runs the edit: the
    /// test still encodes the original behaviour.
    ResiduallyAligned,
    /// Fails on both versions.
    Malformed,
    /// Fails on the mutant for a reason unrelated to the edited lines.
    UnrelatedPath,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::ResiduallyAligned => "ResiduallyAligned",
            Classification::Malformed => "Malformed",
            Classification::UnrelatedPath => "UnrelatedPath",
        }
    }
}

/// The truth table. Passing tests are not classified.
pub fn classify(
    fails_on_mutant: bool,
    passes_on_original: bool,
    covers_region_mutant: bool,
) -> Option<Classification> {
    match (fails_on_mutant, passes_on_original, covers_region_mutant) {
        (false, _, _) => None,
        (true, false, _) => Some(Classification::Malformed),
        (true, true, true) => Some(Classification::ResiduallyAligned),
        (true, true, false) => Some(Classification::UnrelatedPath),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributionRecord {
    pub program_id: String,
    pub operator: OperatorId,
    pub case_name: String,
    pub fails_on_mutant: bool,
    pub passes_on_original: bool,
    pub covers_region_mutant: bool,
    pub classification: Classification,
}

/// Classify every failing case of a suite generated for (and run on) a
/// mutant. Each failing case is re-run alone on the original program.
pub fn attribute_failures<E: Executor + ?Sized>(
    change: &CodeChange,
    mutant_report: &ExecutionReport,
    original: &Path,
    suite: &TestSuite,
    executor: &E,
) -> Result<Vec<AttributionRecord>, ExecError> {
    let mut out = Vec::new();
    for verdict in mutant_report.failing() {
        let on_original = executor.run_single(original, suite, &verdict.case_name)?;
        let passes_on_original = on_original.status.is_pass();
        let covers = covers_region(verdict, change, Version::Mutant);
        let classification =
            classify(true, passes_on_original, covers).expect("failing case is classified");
        out.push(AttributionRecord {
            program_id: change.program_id.clone(),
            operator: change.operator,
            case_name: verdict.case_name.clone(),
            fails_on_mutant: true,
            passes_on_original,
            covers_region_mutant: covers,
            classification,
        });
    }
    Ok(out)
}
