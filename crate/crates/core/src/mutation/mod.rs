//! Grammar-based source mutation.
//!
//! Every operator works in two steps: [`enumerate_sites`] lists candidate
//! nodes in a fixed order, and [`apply`] rewrites one of them. The diff
//! metadata attached to a [`CodeChange`] is derived from the textual edits,
//! never from operator-specific bookkeeping, so every operator is measured
//! the same way.

mod bundle;
pub mod edit;
mod operator;
mod operators;
mod verify;

pub use bundle::{
    bundle_dir, read_bundle, write_bundle, BundleMetadata, DIFF_FILE, METADATA_FILE, MUTANT_FILE,
};
pub use edit::{Hunk, LineDiff};
pub use operator::{Category, OperatorId, UnknownOperator};
pub use verify::{input_pool, verify_sac, verify_spc, SacStatus, SacVerdict, Witness, POOL_SIZE};

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::python::{PySource, SyntaxError};

/// Upper bound on lines a semantic-preserving change is expected to touch.
pub const SPC_LINE_CEILING: u32 = 7;

#[derive(Debug, thiserror::Error)]
pub enum MutationError {
    #[error("source does not parse: {0}")]
    Parse(#[from] SyntaxError),
    #[error("site #{ordinal} of {operator} no longer applies to this source")]
    InapplicableSite {
        operator: OperatorId,
        ordinal: usize,
    },
    #[error("{operator} produced a mutant that does not parse: {error}")]
    BrokenRewrite {
        operator: OperatorId,
        error: SyntaxError,
    },
}

/// A (line, column) position; line is 1-based, column a 0-based byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSite {
    pub operator: OperatorId,
    pub span: Range<usize>,
    pub start: Position,
    pub end: Position,
    /// Index among this operator's sites for the same source.
    pub ordinal: usize,
}

/// One applied mutation and its line-level footprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeChange {
    pub program_id: String,
    pub operator: OperatorId,
    pub category: Category,
    pub site: MutationSite,
    pub seed: u64,
    pub new_source: String,
    pub diff_spans: Vec<Hunk>,
    pub lines_changed: u32,
    /// Edited lines, mutant coordinates.
    pub mutated_region: BTreeSet<u32>,
    /// Edited lines pulled back to original coordinates.
    pub original_region: BTreeSet<u32>,
    /// Original line -> mutant line for every unedited line.
    pub line_map: BTreeMap<u32, u32>,
}

impl CodeChange {
    /// Mutant line -> original line for every unedited mutant line.
    pub fn inverse_line_map(&self) -> BTreeMap<u32, u32> {
        self.line_map.iter().map(|(&o, &m)| (m, o)).collect()
    }

    /// Mutant lines that belong to an edited span (no original counterpart).
    pub fn edited_mutant_lines(&self) -> BTreeSet<u32> {
        self.diff_spans.iter().flat_map(|h| h.new_lines()).collect()
    }

    /// Original lines that belong to an edited span.
    pub fn edited_original_lines(&self) -> BTreeSet<u32> {
        self.diff_spans.iter().flat_map(|h| h.old_lines()).collect()
    }
}

fn position(p: tree_sitter::Point) -> Position {
    Position {
        line: p.row as u32 + 1,
        column: p.column as u32,
    }
}

fn sites_of(src: &PySource, operator: OperatorId) -> Vec<MutationSite> {
    let root = src.root();
    operators::sites(operator, src)
        .into_iter()
        .enumerate()
        .map(|(ordinal, span)| {
            let node = root
                .descendant_for_byte_range(span.start, span.end)
                .expect("site spans come from the tree");
            MutationSite {
                operator,
                start: position(node.start_position()),
                end: position(node.end_position()),
                span,
                ordinal,
            }
        })
        .collect()
}

/// Candidate sites for `operator`, in the operator's fixed order. An empty
/// list means the operator does not apply.
pub fn enumerate_sites(
    source: &str,
    operator: OperatorId,
) -> Result<Vec<MutationSite>, MutationError> {
    let src = PySource::parse(source)?;
    Ok(sites_of(&src, operator))
}

/// Apply `operator` at `site`. `seed` only breaks ties inside an operator
/// (which misleading name or phrase to use).
pub fn apply(
    program_id: &str,
    source: &str,
    site: &MutationSite,
    seed: u64,
) -> Result<CodeChange, MutationError> {
    let src = PySource::parse(source)?;
    let operator = site.operator;
    let inapplicable = || MutationError::InapplicableSite {
        operator,
        ordinal: site.ordinal,
    };
    let current = sites_of(&src, operator);
    if current
        .get(site.ordinal)
        .is_none_or(|s| s.span != site.span)
    {
        return Err(inapplicable());
    }
    let rewrite =
        operators::rewrite(operator, &src, site.span.clone(), seed).ok_or_else(inapplicable)?;
    let new_source = edit::apply_edits(source, &rewrite.edits);
    if let Some(error) = PySource::parse_lenient(new_source.as_str()).first_error() {
        return Err(MutationError::BrokenRewrite { operator, error });
    }
    let diff = edit::line_diff(source, &rewrite.edits);
    if diff.hunks.is_empty() {
        return Err(inapplicable());
    }
    let old_lines = src.line_count() as u32;
    let change = CodeChange {
        program_id: program_id.to_string(),
        operator,
        category: operator.category(),
        site: site.clone(),
        seed,
        lines_changed: diff.lines_changed(),
        mutated_region: diff.mutated_region(),
        original_region: diff.original_region(rewrite.anchor, old_lines),
        diff_spans: diff.hunks,
        line_map: diff.line_map,
        new_source,
    };
    if change.category == Category::Spc && change.lines_changed > SPC_LINE_CEILING {
        log::warn!(
            "{program_id}: {operator} changed {} lines, above the expected ceiling of {SPC_LINE_CEILING}",
            change.lines_changed
        );
    }
    Ok(change)
}

/// The variant for `(program, operator)`: the first site in order, or `None`
/// if the operator has no site.
pub fn first_change(
    program_id: &str,
    source: &str,
    operator: OperatorId,
    seed: u64,
) -> Result<Option<CodeChange>, MutationError> {
    match enumerate_sites(source, operator)?.first() {
        Some(site) => apply(program_id, source, site, seed).map(Some),
        None => Ok(None),
    }
}
