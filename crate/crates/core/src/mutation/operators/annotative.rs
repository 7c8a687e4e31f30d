//! Comment-level operators: misleading comments (English and Mandarin) and
//! comment removal.

use std::ops::Range;

use tree_sitter::Node;

use super::{code_children, is_string_statement, row, Rewrite};
use crate::mutation::edit::Edit;
use crate::python::{line_range, preorder, PySource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Language {
    English,
    Mandarin,
}

/// Descriptions that contradict what a typical branch or loop does.
const PHRASES: [(&str, &str); 6] = [
    ("Returns the sum of all values", "返回总和"),
    (
        "Sorts the input in descending order",
        "按降序对输入进行排序",
    ),
    ("This loop never executes", "此循环从不执行"),
    ("Skips every negative value", "跳过所有负数"),
    ("Counts only the even entries", "只统计偶数项"),
    ("Exits early when the input is empty", "输入为空时提前退出"),
];

fn phrase(seed: u64, lang: Language) -> &'static str {
    let (en, zh) = PHRASES[(seed % PHRASES.len() as u64) as usize];
    match lang {
        Language::English => en,
        Language::Mandarin => zh,
    }
}

fn is_branch_or_loop(src: &PySource, node: Node<'_>) -> bool {
    matches!(
        node.kind(),
        "if_statement" | "for_statement" | "while_statement"
    ) && src.starts_line(node)
}

pub(super) fn comment_sites(src: &PySource) -> Vec<Range<usize>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| is_branch_or_loop(src, *n))
        .map(|n| n.byte_range())
        .collect()
}

pub(super) fn misleading_comment(
    src: &PySource,
    span: Range<usize>,
    seed: u64,
    lang: Language,
) -> Option<Rewrite> {
    let node = preorder(src.root())
        .into_iter()
        .find(|n| n.byte_range() == span && is_branch_or_loop(src, *n))?;
    let indent = src.indent_at(node.start_byte());
    let line_start = node.start_byte() - indent.len();
    Some(Rewrite {
        edits: vec![Edit::insert(
            line_start,
            format!("{indent}# {}\n", phrase(seed, lang)),
        )],
        anchor: Some(row(node)),
    })
}

/// Bare string statements on lines of their own: docstrings and strings used
/// as block comments.
fn removable_strings<'a>(src: &'a PySource) -> Vec<Node<'a>> {
    preorder(src.root())
        .into_iter()
        .filter(|n| is_string_statement(*n) && src.starts_line(*n) && src.ends_line(*n))
        .collect()
}

// One site spanning the whole file: the operator rewrites every comment at once.
#[allow(clippy::single_range_in_vec_init)]
pub(super) fn remove_comment_sites(src: &PySource) -> Vec<Range<usize>> {
    let any = preorder(src.root()).iter().any(|n| n.kind() == "comment")
        || !removable_strings(src).is_empty();
    if any {
        vec![0..src.text().len()]
    } else {
        Vec::new()
    }
}

/// Byte range of whole rows `first..=last`, including the final newline.
fn whole_rows(src: &PySource, first: usize, last: usize) -> Range<usize> {
    let start = src.line_start(first);
    let end = line_range(src.text(), last).end;
    let end = if end < src.text().len() { end + 1 } else { end };
    start..end
}

pub(super) fn remove_comments(src: &PySource, span: Range<usize>) -> Option<Rewrite> {
    if span != (0..src.text().len()) {
        return None;
    }
    let text = src.text();
    let mut edits: Vec<Edit> = Vec::new();

    for s in removable_strings(src) {
        let block = s.parent()?;
        let siblings = code_children(block);
        let only_strings = siblings
            .iter()
            .all(|c| is_string_statement(*c) && src.starts_line(*c) && src.ends_line(*c));
        if only_strings && siblings.first().is_some_and(|f| f.id() == s.id()) {
            // Keep the block non-empty.
            edits.push(Edit::replace(s.byte_range(), "pass"));
        } else {
            edits.push(Edit::delete(whole_rows(
                src,
                s.start_position().row,
                s.end_position().row,
            )));
        }
    }

    let covered = |at: usize, edits: &[Edit]| {
        edits
            .iter()
            .any(|e| e.range.start <= at && at < e.range.end)
    };
    for c in preorder(src.root())
        .into_iter()
        .filter(|n| n.kind() == "comment")
    {
        if covered(c.start_byte(), &edits) {
            continue;
        }
        let range = if src.starts_line(c) {
            whole_rows(src, c.start_position().row, c.start_position().row)
        } else {
            let before = text[..c.start_byte()].trim_end_matches([' ', '\t']).len();
            before..c.end_byte()
        };
        edits.push(Edit::delete(range));
    }
    if edits.is_empty() {
        return None;
    }
    Some(Rewrite {
        edits,
        anchor: None,
    })
}
