//! Semantic-altering operators. Every rewrite touches a single source line.

use std::ops::Range;

use tree_sitter::Node;

use super::{code_children, find, single_row, Rewrite};
use crate::mutation::edit::Edit;
use crate::python::{children, preorder, PySource};

// ---- BoundaryShift -------------------------------------------------------

/// Positional arguments of a call, or `None` if any argument is a keyword or splat.
fn positional_args(call: Node<'_>) -> Option<Vec<Node<'_>>> {
    let args = call.child_by_field_name("arguments")?;
    if args.kind() != "argument_list" {
        return None;
    }
    let list = code_children(args);
    if list.iter().any(|a| {
        matches!(
            a.kind(),
            "keyword_argument" | "list_splat" | "dictionary_splat"
        )
    }) {
        return None;
    }
    Some(list)
}

/// The `stop` argument of a `range(...)` call.
fn range_stop<'a>(src: &PySource, call: Node<'a>) -> Option<Node<'a>> {
    let func = call.child_by_field_name("function")?;
    if func.kind() != "identifier" || src.node_text(func) != "range" {
        return None;
    }
    let args = positional_args(call)?;
    let stop = match args.len() {
        1 => args[0],
        2 | 3 => args[1],
        _ => return None,
    };
    single_row(stop).then_some(stop)
}

/// The upper bound of `a[lo:hi]` / `a[lo:hi:step]`.
fn slice_stop(slice: Node<'_>) -> Option<Node<'_>> {
    let mut colons = 0;
    for child in children(slice) {
        match child.kind() {
            ":" => colons += 1,
            "comment" => {}
            _ if colons == 1 && child.is_named() => return single_row(child).then_some(child),
            _ => {}
        }
    }
    None
}

const SHIFTED_COMPARISONS: [(&str, &str); 4] = [("<", "<="), ("<=", "<"), (">", ">="), (">=", ">")];

/// The single ordering operator of a `while` condition.
fn while_bound(cmp: Node<'_>) -> Option<Node<'_>> {
    let parent = cmp.parent()?;
    if parent.kind() != "while_statement" || parent.child_by_field_name("condition")? != cmp {
        return None;
    }
    let mut cursor = cmp.walk();
    let ops: Vec<Node<'_>> = cmp
        .children_by_field_name("operators", &mut cursor)
        .collect();
    match ops.as_slice() {
        [op] if SHIFTED_COMPARISONS
            .iter()
            .any(|(from, _)| *from == op.kind()) =>
        {
            Some(*op)
        }
        _ => None,
    }
}

pub(super) fn boundary_shift_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| match n.kind() {
            "call" => range_stop(src, *n).is_some(),
            "slice" => slice_stop(*n).is_some(),
            "comparison_operator" => while_bound(*n).is_some(),
            _ => false,
        })
        .map(|n| n.byte_range())
        .collect()
}

/// Does `expr - 1` parse as `(expr) - 1` without extra parentheses?
fn binds_tighter_than_minus(src: &PySource, expr: Node<'_>) -> bool {
    match expr.kind() {
        "identifier"
        | "integer"
        | "float"
        | "call"
        | "attribute"
        | "subscript"
        | "parenthesized_expression"
        | "unary_operator" => true,
        "binary_operator" => expr.child_by_field_name("operator").is_some_and(|op| {
            matches!(
                src.node_text(op),
                "+" | "-" | "*" | "/" | "//" | "%" | "**" | "@"
            )
        }),
        _ => false,
    }
}

fn minus_one(src: &PySource, expr: Node<'_>) -> Edit {
    let text = src.node_text(expr);
    let shifted = if binds_tighter_than_minus(src, expr) {
        format!("{text} - 1")
    } else {
        format!("({text}) - 1")
    };
    Edit::replace(expr.byte_range(), shifted)
}

pub(super) fn boundary_shift(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let node = find(src, &span, &["call", "slice", "comparison_operator"])?;
    let edit = match node.kind() {
        "call" => minus_one(src, range_stop(src, node)?),
        "slice" => minus_one(src, slice_stop(node)?),
        _ => {
            let op = while_bound(node)?;
            let (_, to) = SHIFTED_COMPARISONS
                .iter()
                .find(|(from, _)| *from == op.kind())?;
            Edit::replace(op.byte_range(), *to)
        }
    };
    Some(Rewrite {
        edits: vec![edit],
        anchor: None,
    })
}

// ---- ChangedBooleanLogic -------------------------------------------------

pub(super) fn boolean_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| n.kind() == "boolean_operator" && n.child_by_field_name("operator").is_some())
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn boolean(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let node = find(src, &span, &["boolean_operator"])?;
    let op = node.child_by_field_name("operator")?;
    let swapped = match src.node_text(op) {
        "and" => "or",
        "or" => "and",
        _ => return None,
    };
    Some(Rewrite {
        edits: vec![Edit::replace(op.byte_range(), swapped)],
        anchor: None,
    })
}

// ---- ChangedArithmetic ---------------------------------------------------

const ARITHMETIC_SWAPS: [(&str, &str); 14] = [
    ("+", "-"),
    ("-", "+"),
    ("*", "+"),
    ("/", "*"),
    ("//", "*"),
    ("%", "//"),
    ("**", "*"),
    ("+=", "-="),
    ("-=", "+="),
    ("*=", "+="),
    ("/=", "*="),
    ("//=", "*="),
    ("%=", "//="),
    ("**=", "*="),
];

fn arithmetic_operator<'a>(src: &PySource, node: Node<'a>) -> Option<(Node<'a>, &'static str)> {
    let op = match node.kind() {
        "binary_operator" => {
            let is_text = |field| {
                node.child_by_field_name(field)
                    .is_some_and(|c| matches!(c.kind(), "string" | "concatenated_string"))
            };
            if is_text("left") || is_text("right") {
                return None;
            }
            node.child_by_field_name("operator")?
        }
        "augmented_assignment" => node.child_by_field_name("operator")?,
        _ => return None,
    };
    let text = src.node_text(op);
    ARITHMETIC_SWAPS
        .iter()
        .find(|(from, _)| *from == text)
        .map(|(_, to)| (op, *to))
}

pub(super) fn arithmetic_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| arithmetic_operator(src, *n).is_some())
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn arithmetic(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let node = find(src, &span, &["binary_operator", "augmented_assignment"])?;
    let (op, to) = arithmetic_operator(src, node)?;
    Some(Rewrite {
        edits: vec![Edit::replace(op.byte_range(), to)],
        anchor: None,
    })
}

// ---- ArgumentSwap --------------------------------------------------------

fn value_class(node: Node<'_>) -> Option<&'static str> {
    Some(match node.kind() {
        "identifier" => "name",
        "integer" | "float" => "number",
        "string" => "string",
        "attribute" => "attribute",
        "subscript" => "subscript",
        "true" | "false" => "bool",
        _ => return None,
    })
}

fn swappable_pair<'a>(src: &PySource, call: Node<'a>) -> Option<(Node<'a>, Node<'a>)> {
    let args = call.child_by_field_name("arguments")?;
    if args.kind() != "argument_list" {
        return None;
    }
    let positional: Vec<Node<'a>> = code_children(args)
        .into_iter()
        .take_while(|a| {
            !matches!(
                a.kind(),
                "keyword_argument" | "list_splat" | "dictionary_splat"
            )
        })
        .collect();
    let [a, b, ..] = positional.as_slice() else {
        return None;
    };
    let same_class = value_class(*a).is_some() && value_class(*a) == value_class(*b);
    let distinct = src.node_text(*a) != src.node_text(*b);
    let one_line = a.start_position().row == b.end_position().row;
    (same_class && distinct && one_line).then_some((*a, *b))
}

pub(super) fn argument_swap_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| n.kind() == "call" && swappable_pair(src, *n).is_some())
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn argument_swap(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let call = find(src, &span, &["call"])?;
    let (a, b) = swappable_pair(src, call)?;
    Some(Rewrite {
        edits: vec![
            Edit::replace(a.byte_range(), src.node_text(b)),
            Edit::replace(b.byte_range(), src.node_text(a)),
        ],
        anchor: None,
    })
}

// ---- VariableRoleRebinding -----------------------------------------------

/// Identifier nodes in `expr` that read a variable named `name` (attribute
/// fields and keyword names excluded).
fn reads_of<'a>(src: &PySource, expr: Node<'a>, name: &str) -> Vec<Node<'a>> {
    preorder(expr)
        .into_iter()
        .filter(|n| n.kind() == "identifier" && src.node_text(*n) == name)
        .filter(|n| {
            let Some(parent) = n.parent() else {
                return true;
            };
            let is_field = |field| {
                parent
                    .child_by_field_name(field)
                    .is_some_and(|c| c.id() == n.id())
            };
            !(parent.kind() == "attribute" && is_field("attribute"))
                && !(parent.kind() == "keyword_argument" && is_field("name"))
        })
        .collect()
}

/// For an accumulator statement inside a `for` loop, the (loop variable,
/// accumulator) pair it would rebind: `acc += x` or `acc = acc <op> x`.
fn rebinding_target<'a>(src: &'a PySource, stmt: Node<'a>) -> Option<(&'a str, &'a str, Node<'a>)> {
    let (acc, rhs) = match stmt.kind() {
        "augmented_assignment" => (
            stmt.child_by_field_name("left")?,
            stmt.child_by_field_name("right")?,
        ),
        "assignment" => {
            let rhs = stmt.child_by_field_name("right")?;
            if rhs.kind() != "binary_operator" {
                return None;
            }
            (stmt.child_by_field_name("left")?, rhs)
        }
        _ => return None,
    };
    if acc.kind() != "identifier" || !single_row(stmt) {
        return None;
    }
    let acc_name = src.node_text(acc);
    if stmt.kind() == "assignment" && reads_of(src, rhs, acc_name).is_empty() {
        return None;
    }
    let mut cursor = stmt.parent();
    while let Some(node) = cursor {
        match node.kind() {
            "function_definition" | "class_definition" | "lambda" => return None,
            "for_statement" => {
                if let Some(target) = node
                    .child_by_field_name("left")
                    .filter(|t| t.kind() == "identifier")
                {
                    let loop_var = src.node_text(target);
                    let in_body = node.child_by_field_name("body").is_some_and(|b| {
                        b.start_byte() <= stmt.start_byte() && stmt.end_byte() <= b.end_byte()
                    });
                    if in_body && loop_var != acc_name && !reads_of(src, rhs, loop_var).is_empty() {
                        return Some((loop_var, acc_name, rhs));
                    }
                }
            }
            _ => {}
        }
        cursor = node.parent();
    }
    None
}

pub(super) fn rebinding_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| rebinding_target(src, *n).is_some())
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn rebinding(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    let stmt = find(src, &span, &["augmented_assignment", "assignment"])?;
    let (loop_var, acc, rhs) = rebinding_target(src, stmt)?;
    let edits = reads_of(src, rhs, loop_var)
        .into_iter()
        .map(|n| Edit::replace(n.byte_range(), acc))
        .collect();
    Some(Rewrite {
        edits,
        anchor: None,
    })
}
