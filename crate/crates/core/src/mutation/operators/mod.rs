//! Operator implementations. Each operator exposes a site finder returning
//! node spans in a fixed order, and a rewriter that turns one of those spans
//! into byte edits.

mod annotative;
mod identifier;
mod sac;
mod structural;

use std::collections::BTreeSet;
use std::ops::Range;

use tree_sitter::Node;

use super::edit::Edit;
use super::OperatorId;
use crate::python::{preorder, PySource};

/// Edits for one applied site, plus the original line a pure insertion is
/// attributed to.
#[derive(Debug, Clone)]
pub(crate) struct Rewrite {
    pub edits: Vec<Edit>,
    /// 1-based original line.
    pub anchor: Option<u32>,
}

pub(crate) fn sites(op: OperatorId, src: &PySource) -> Vec<Range<usize>> {
    match op {
        OperatorId::BoundaryShift => sac::boundary_shift_sites(src),
        OperatorId::ChangedBooleanLogic => sac::boolean_sites(src),
        OperatorId::ChangedArithmetic => sac::arithmetic_sites(src),
        OperatorId::ArgumentSwap => sac::argument_swap_sites(src),
        OperatorId::VariableRoleRebinding => sac::rebinding_sites(src),
        OperatorId::VoidLoopInjection => structural::void_loop_sites(src),
        OperatorId::VoidCondition => structural::void_condition_sites(src),
        OperatorId::RedundantElse => structural::redundant_else_sites(src),
        OperatorId::EquivalentComparison => structural::equivalent_comparison_sites(src),
        OperatorId::UnusedParameter => structural::unused_parameter_sites(src),
        OperatorId::MisleadingVariables => identifier::misleading_variable_sites(src),
        OperatorId::MisleadingComments | OperatorId::MisleadingMandarin => {
            annotative::comment_sites(src)
        }
        OperatorId::RemoveComments => annotative::remove_comment_sites(src),
    }
}

pub(crate) fn rewrite(
    op: OperatorId,
    src: &PySource,
    span: Range<usize>,
    seed: u64,
) -> Option<Rewrite> {
    match op {
        OperatorId::BoundaryShift => sac::boundary_shift(src, span),
        OperatorId::ChangedBooleanLogic => sac::boolean(src, span),
        OperatorId::ChangedArithmetic => sac::arithmetic(src, span),
        OperatorId::ArgumentSwap => sac::argument_swap(src, span),
        OperatorId::VariableRoleRebinding => sac::rebinding(src, span),
        OperatorId::VoidLoopInjection => structural::void_loop(src, span),
        OperatorId::VoidCondition => structural::void_condition(src, span),
        OperatorId::RedundantElse => structural::redundant_else(src, span),
        OperatorId::EquivalentComparison => structural::equivalent_comparison(src, span),
        OperatorId::UnusedParameter => structural::unused_parameter(src, span),
        OperatorId::MisleadingVariables => identifier::misleading_variable(src, span, seed),
        OperatorId::MisleadingComments => {
            annotative::misleading_comment(src, span, seed, annotative::Language::English)
        }
        OperatorId::MisleadingMandarin => {
            annotative::misleading_comment(src, span, seed, annotative::Language::Mandarin)
        }
        OperatorId::RemoveComments => annotative::remove_comments(src, span),
    }
}

/// The node with exactly `span` whose kind is one of `kinds`.
fn find<'a>(src: &'a PySource, span: &Range<usize>, kinds: &[&str]) -> Option<Node<'a>> {
    preorder(src.root())
        .into_iter()
        .find(|n| n.byte_range() == *span && kinds.contains(&n.kind()))
}

fn row(node: Node<'_>) -> u32 {
    node.start_position().row as u32 + 1
}

fn single_row(node: Node<'_>) -> bool {
    node.start_position().row == node.end_position().row
}

use crate::python::code_named_children as code_children;

fn in_class_body(node: Node<'_>) -> bool {
    node.parent()
        .filter(|p| p.kind() == "block")
        .and_then(|b| b.parent())
        .is_some_and(|g| g.kind() == "class_definition")
}

/// A statement directly inside a module or block, excluding class bodies.
fn is_block_statement(node: Node<'_>) -> bool {
    crate::python::is_statement(node)
        && node
            .parent()
            .is_some_and(|p| matches!(p.kind(), "block" | "module"))
        && !in_class_body(node)
}

/// A bare string expression statement (docstring or string used as a comment).
fn is_string_statement(node: Node<'_>) -> bool {
    node.kind() == "expression_statement"
        && code_children(node).len() == 1
        && matches!(
            code_children(node)[0].kind(),
            "string" | "concatenated_string"
        )
}

/// First statement of a module or function body that is a string literal.
fn is_docstring_position(node: Node<'_>) -> bool {
    is_string_statement(node)
        && node
            .parent()
            .and_then(|p| code_children(p).first().copied())
            .is_some_and(|first| first.id() == node.id())
}

fn is_future_import(src: &PySource, node: Node<'_>) -> bool {
    node.kind() == "future_import_statement"
        || (node.kind() == "import_from_statement" && src.node_text(node).contains("__future__"))
}

/// Every identifier-like token text in the program, used to avoid capturing
/// an existing name when inventing a new one.
fn used_names(src: &PySource) -> BTreeSet<String> {
    src.identifiers().into_iter().map(str::to_string).collect()
}

/// First candidate not already used; falls back to numbered variants of the first.
fn fresh_name(used: &BTreeSet<String>, candidates: &[&str]) -> String {
    for c in candidates {
        if !used.contains(*c) {
            return (*c).to_string();
        }
    }
    let base = candidates[0];
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !used.contains(n))
        .expect("unbounded search")
}

/// Indentation unit for a new nested block under a line indented with `indent`.
fn indent_unit(indent: &str) -> &'static str {
    if indent.contains('\t') {
        "\t"
    } else {
        "    "
    }
}
