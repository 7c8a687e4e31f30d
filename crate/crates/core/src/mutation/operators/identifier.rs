//! MisleadingVariables: rename a local to a deceptive name from a fixed table.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use tree_sitter::Node;

use super::{fresh_name, used_names, Rewrite};
use crate::mutation::edit::Edit;
use crate::python::{preorder, PySource};

const SWAPS: [(&str, &str); 4] = [
    ("count", "sum"),
    ("total", "index"),
    ("min", "max"),
    ("flag", "length"),
];

/// Longest span of lines a rename may touch, matching the SPC size ceiling.
const MAX_ROWS: usize = 7;

/// Calls that can observe variables by name; renaming is unsafe around them.
const REFLECTIVE: [&str; 7] = [
    "eval", "exec", "locals", "globals", "vars", "getattr", "setattr",
];

fn partner(name: &str) -> Option<&'static str> {
    SWAPS.iter().find_map(|&(a, b)| match name {
        n if n == a => Some(b),
        n if n == b => Some(a),
        _ => None,
    })
}

fn is_field(node: Node<'_>, parent_kind: &str, field: &str) -> bool {
    node.parent().is_some_and(|p| {
        p.kind() == parent_kind
            && p.child_by_field_name(field)
                .is_some_and(|c| c.id() == node.id())
    })
}

/// Identifier occurrences that refer to a variable, i.e. not attribute names
/// or keyword-argument labels.
fn variable_refs<'a>(src: &'a PySource) -> Vec<Node<'a>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| n.kind() == "identifier")
        .filter(|n| {
            !is_field(*n, "attribute", "attribute") && !is_field(*n, "keyword_argument", "name")
        })
        .collect()
}

fn assigned_names(src: &PySource) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    for n in preorder(src.root()) {
        let target = match n.kind() {
            "assignment" | "augmented_assignment" | "for_statement" | "for_in_clause" => {
                n.child_by_field_name("left")
            }
            "named_expression" => n.child_by_field_name("name"),
            _ => None,
        };
        let Some(target) = target else { continue };
        for id in preorder(target) {
            if id.kind() == "identifier"
                && !is_field(id, "attribute", "attribute")
                && !in_subscript_or_attribute(id, target)
            {
                out.insert(src.node_text(id));
            }
        }
    }
    out
}

/// Is `id` below an attribute or subscript node inside `target`? Such
/// identifiers are reads (`a[i] = ...` reads `a` and `i`).
fn in_subscript_or_attribute(id: Node<'_>, target: Node<'_>) -> bool {
    let mut cur = id.parent();
    while let Some(p) = cur {
        if p.id() == target.id() {
            return matches!(target.kind(), "subscript" | "attribute");
        }
        if matches!(p.kind(), "subscript" | "attribute") {
            return true;
        }
        cur = p.parent();
    }
    false
}

/// Names that must never be renamed: definitions, imports, attribute names
/// and keyword labels.
fn protected_names(src: &PySource) -> BTreeSet<&str> {
    let mut out: BTreeSet<&str> = ["_", "self", "cls"].into();
    for n in preorder(src.root()) {
        match n.kind() {
            "function_definition" | "class_definition" => {
                if let Some(name) = n.child_by_field_name("name") {
                    out.insert(src.node_text(name));
                }
            }
            "import_statement" | "import_from_statement" | "future_import_statement" => {
                for id in preorder(n) {
                    if id.kind() == "identifier" {
                        out.insert(src.node_text(id));
                    }
                }
            }
            // `obj.name` elsewhere may refer to the same binding (class attributes).
            "attribute" => {
                if let Some(name) = n.child_by_field_name("attribute") {
                    out.insert(src.node_text(name));
                }
            }
            "keyword_argument" => {
                if let Some(name) = n.child_by_field_name("name") {
                    out.insert(src.node_text(name));
                }
            }
            _ => {}
        }
    }
    out
}

fn uses_reflection(src: &PySource) -> bool {
    preorder(src.root()).into_iter().any(|n| {
        n.kind() == "call"
            && n.child_by_field_name("function")
                .is_some_and(|f| f.kind() == "identifier" && REFLECTIVE.contains(&src.node_text(f)))
    })
}

pub(super) fn misleading_variable_sites(src: &PySource) -> Vec<Range<usize>> {
    if uses_reflection(src) {
        return Vec::new();
    }
    let assigned = assigned_names(src);
    let protected = protected_names(src);
    // name -> (uses, first occurrence, rows touched)
    let mut stats: BTreeMap<&str, (usize, Range<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for n in variable_refs(src) {
        let name = src.node_text(n);
        if !assigned.contains(name)
            || protected.contains(name)
            || (name.starts_with("__") && name.ends_with("__"))
        {
            continue;
        }
        let entry = stats
            .entry(name)
            .or_insert_with(|| (0, n.byte_range(), BTreeSet::new()));
        entry.0 += 1;
        entry.2.insert(n.start_position().row);
    }
    let mut ranked: Vec<(usize, Range<usize>)> = stats
        .into_values()
        .filter(|(_, _, rows)| rows.len() <= MAX_ROWS)
        .map(|(uses, first, _)| (uses, first))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.start.cmp(&b.1.start)));
    ranked.into_iter().map(|(_, span)| span).collect()
}

fn replacement(name: &str, used: &BTreeSet<String>, seed: u64) -> String {
    if let Some(p) = partner(name).filter(|p| !used.contains(*p)) {
        return p.to_string();
    }
    let free: Vec<&str> = SWAPS
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .filter(|n| !used.contains(*n))
        .collect();
    if !free.is_empty() {
        return free[(seed % free.len() as u64) as usize].to_string();
    }
    fresh_name(used, &[partner(name).unwrap_or("count")])
}

pub(super) fn misleading_variable(
    src: &PySource,
    span: Range<usize>,
    seed: u64,
) -> Option<Rewrite> {
    if !misleading_variable_sites(src).contains(&span) {
        return None;
    }
    let name = &src.text()[span];
    let new = replacement(name, &used_names(src), seed);
    let edits = variable_refs(src)
        .into_iter()
        .filter(|n| src.node_text(*n) == name)
        .map(|n| Edit::replace(n.byte_range(), new.clone()))
        .collect();
    Some(Rewrite {
        edits,
        anchor: None,
    })
}
