//! Structural semantic-preserving operators: dead control flow, redundant
//! branches, negated comparisons and unused parameters.

use std::ops::Range;

use tree_sitter::Node;

use super::{
    code_children, find, fresh_name, in_class_body, indent_unit, is_block_statement,
    is_docstring_position, is_future_import, is_string_statement, row, single_row, used_names,
    Rewrite,
};
use crate::mutation::edit::Edit;
use crate::python::{children, line_range, preorder, PySource};

// ---- VoidLoopInjection ---------------------------------------------------

fn void_loop_target(src: &PySource, node: Node<'_>) -> bool {
    is_block_statement(node)
        && src.starts_line(node)
        && !is_future_import(src, node)
        && !is_docstring_position(node)
}

pub(super) fn void_loop_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| void_loop_target(src, *n))
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn void_loop(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let stmt = preorder(src.root())
        .into_iter()
        .find(|n| n.byte_range() == span && void_loop_target(src, *n))?;
    let var = fresh_name(&used_names(src), &["i", "j", "k", "_i"]);
    let indent = src.indent_at(stmt.start_byte());
    let line_start = stmt.start_byte() - indent.len();
    Some(Rewrite {
        edits: vec![Edit::insert(
            line_start,
            format!("{indent}for {var} in range(1): pass\n"),
        )],
        anchor: Some(row(stmt)),
    })
}

// ---- VoidCondition -------------------------------------------------------

fn void_condition_target(src: &PySource, node: Node<'_>) -> bool {
    let simple = matches!(
        node.kind(),
        "expression_statement"
            | "return_statement"
            | "pass_statement"
            | "break_statement"
            | "continue_statement"
            | "delete_statement"
            | "raise_statement"
            | "assert_statement"
    );
    simple
        && is_block_statement(node)
        && single_row(node)
        && src.starts_line(node)
        && src.ends_line(node)
        && !is_string_statement(node)
}

pub(super) fn void_condition_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| void_condition_target(src, *n))
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn void_condition(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let stmt = preorder(src.root())
        .into_iter()
        .find(|n| n.byte_range() == span && void_condition_target(src, *n))?;
    let indent = src.indent_at(stmt.start_byte());
    let unit = indent_unit(indent);
    Some(Rewrite {
        edits: vec![Edit::insert(
            stmt.start_byte(),
            format!("if True:\n{indent}{unit}"),
        )],
        anchor: None,
    })
}

// ---- RedundantElse -------------------------------------------------------

fn lacks_else(src: &PySource, node: Node<'_>) -> bool {
    node.kind() == "if_statement"
        && src.starts_line(node)
        && !children(node).iter().any(|c| c.kind() == "else_clause")
}

pub(super) fn redundant_else_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| lacks_else(src, *n))
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn redundant_else(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let node = find(src, &span, &["if_statement"])?;
    if !lacks_else(src, node) {
        return None;
    }
    let indent = src.indent_at(node.start_byte());
    let unit = indent_unit(indent);
    // Insert after anything trailing the last body line, e.g. a comment.
    let end = line_range(src.text(), node.end_position().row).end;
    Some(Rewrite {
        edits: vec![Edit::insert(
            end,
            format!("\n{indent}else:\n{indent}{unit}pass"),
        )],
        anchor: Some(row(node)),
    })
}

// ---- EquivalentComparison ------------------------------------------------

const NEGATED: [(&str, &str); 6] = [
    ("<", ">="),
    (">=", "<"),
    ("<=", ">"),
    (">", "<="),
    ("==", "!="),
    ("!=", "=="),
];

fn negatable<'a>(src: &PySource, cmp: Node<'a>) -> Option<(Node<'a>, &'static str)> {
    if cmp.kind() != "comparison_operator" || !single_row(cmp) {
        return None;
    }
    let mut cursor = cmp.walk();
    let ops: Vec<Node<'a>> = cmp
        .children_by_field_name("operators", &mut cursor)
        .collect();
    let [op] = ops.as_slice() else { return None };
    let text = src.node_text(*op);
    NEGATED
        .iter()
        .find(|(from, _)| *from == text)
        .map(|(_, to)| (*op, *to))
}

pub(super) fn equivalent_comparison_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| negatable(src, *n).is_some())
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn equivalent_comparison(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let cmp = find(src, &span, &["comparison_operator"])?;
    let (op, negated) = negatable(src, cmp)?;
    let left = &src.text()[cmp.start_byte()..op.start_byte()];
    let right = &src.text()[op.end_byte()..cmp.end_byte()];
    let mut text = format!("not ({} {negated} {})", left.trim_end(), right.trim_start());
    // `not` binds looser than anything that could take the comparison as an operand.
    let needs_parens = cmp.parent().is_some_and(|p| {
        matches!(
            p.kind(),
            "binary_operator"
                | "unary_operator"
                | "comparison_operator"
                | "attribute"
                | "call"
                | "subscript"
        ) && p
            .child_by_field_name("arguments")
            .is_none_or(|a| a.id() != cmp.id())
            && p.child_by_field_name("subscript")
                .is_none_or(|s| s.id() != cmp.id())
    });
    if needs_parens {
        text = format!("({text})");
    }
    Some(Rewrite {
        edits: vec![Edit::replace(cmp.byte_range(), text)],
        anchor: None,
    })
}

// ---- UnusedParameter -----------------------------------------------------

fn plain_parameters(params: Node<'_>) -> bool {
    code_children(params).iter().all(|p| {
        matches!(
            p.kind(),
            "identifier" | "default_parameter" | "typed_parameter" | "typed_default_parameter"
        )
    })
}

/// Names bound anywhere other than by a `def`.
fn rebound(src: &PySource, name: &str) -> bool {
    preorder(src.root()).into_iter().any(|n| match n.kind() {
        "assignment" | "augmented_assignment" | "for_statement" | "for_in_clause" => {
            n.child_by_field_name("left").is_some_and(|l| {
                preorder(l)
                    .iter()
                    .any(|i| i.kind() == "identifier" && src.node_text(*i) == name)
            })
        }
        "parameters" | "lambda_parameters" | "aliased_import" | "dotted_name"
        | "global_statement" => preorder(n)
            .iter()
            .any(|i| i.kind() == "identifier" && src.node_text(*i) == name),
        "class_definition" => n
            .child_by_field_name("name")
            .is_some_and(|c| src.node_text(c) == name),
        _ => false,
    })
}

fn unused_parameter_target<'a>(src: &'a PySource, def: Node<'a>) -> Option<&'a str> {
    if def.kind() != "function_definition" || in_class_body(def) {
        return None;
    }
    if def
        .parent()
        .is_some_and(|p| p.kind() == "decorated_definition")
    {
        return None;
    }
    let params = def.child_by_field_name("parameters")?;
    if !plain_parameters(params) {
        return None;
    }
    let name = src.node_text(def.child_by_field_name("name")?);
    let defs = preorder(src.root())
        .into_iter()
        .filter(|n| {
            n.kind() == "function_definition"
                && n.child_by_field_name("name")
                    .is_some_and(|c| src.node_text(c) == name)
        })
        .count();
    (defs == 1 && !rebound(src, name)).then_some(name)
}

pub(super) fn unused_parameter_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| unused_parameter_target(src, *n).is_some())
        .map(|n| n.byte_range())
        .collect()
}

/// Edit appending `item` as the last element of a parenthesised list node
/// (`parameters` or `argument_list`), honouring a trailing comma.
fn append_item(list: Node<'_>, item: &str) -> Option<Edit> {
    let tokens: Vec<Node<'_>> = children(list)
        .into_iter()
        .filter(|c| c.kind() != "comment")
        .collect();
    if tokens.last()?.kind() != ")" {
        return None;
    }
    let before = tokens.iter().rev().nth(1)?;
    let text = match before.kind() {
        "(" => item.to_string(),
        "," => format!(" {item}"),
        _ => format!(", {item}"),
    };
    Some(Edit::insert(before.end_byte(), text))
}

pub(super) fn unused_parameter(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let def = find(src, &span, &["function_definition"])?;
    let name = unused_parameter_target(src, def)?;
    let param = fresh_name(&used_names(src), &["null", "unused", "_null"]);
    let mut edits = vec![append_item(
        def.child_by_field_name("parameters")?,
        &format!("{param}=None"),
    )?];
    for call in preorder(src.root()) {
        if call.kind() != "call" {
            continue;
        }
        let callee = call.child_by_field_name("function");
        if !callee.is_some_and(|f| f.kind() == "identifier" && src.node_text(f) == name) {
            continue;
        }
        // `f(x for x in xs)` cannot take a second argument without parentheses.
        let Some(args) = call
            .child_by_field_name("arguments")
            .filter(|a| a.kind() == "argument_list")
        else {
            continue;
        };
        edits.push(append_item(args, &format!("{param}=None"))?);
    }
    Some(Rewrite {
        edits,
        anchor: None,
    })
}
