//! Byte-level edits and the line-level bookkeeping derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::python::line_starts;

/// Replace `range` of the original text with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub range: Range<usize>,
    pub replacement: String,
}

impl Edit {
    pub fn replace(range: Range<usize>, replacement: impl Into<String>) -> Self {
        Self {
            range,
            replacement: replacement.into(),
        }
    }

    pub fn insert(at: usize, text: impl Into<String>) -> Self {
        Self {
            range: at..at,
            replacement: text.into(),
        }
    }

    pub fn delete(range: Range<usize>) -> Self {
        Self {
            range,
            replacement: String::new(),
        }
    }
}

/// Apply non-overlapping edits. Edits are sorted by position first; two
/// insertions at the same offset keep their given order.
pub fn apply_edits(text: &str, edits: &[Edit]) -> String {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.range.start, e.range.end));
    let mut out = String::with_capacity(text.len() + 64);
    let mut cursor = 0;
    for e in sorted {
        assert!(
            e.range.start >= cursor,
            "overlapping edits at byte {}",
            e.range.start
        );
        out.push_str(&text[cursor..e.range.start]);
        out.push_str(&e.replacement);
        cursor = e.range.end;
    }
    out.push_str(&text[cursor..]);
    out
}

/// One contiguous run of changed lines. Line numbers are 1-based; a zero
/// length means a pure insertion (old side) or pure deletion (new side)
/// positioned before the given line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
}

impl Hunk {
    pub fn old_lines(&self) -> Range<u32> {
        self.old_start..self.old_start + self.old_len
    }

    pub fn new_lines(&self) -> Range<u32> {
        self.new_start..self.new_start + self.new_len
    }

    pub fn changed(&self) -> u32 {
        self.old_len.max(self.new_len)
    }
}

/// Line-level summary of a set of edits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDiff {
    pub hunks: Vec<Hunk>,
    /// Original line -> mutant line, for every line outside a hunk.
    pub line_map: BTreeMap<u32, u32>,
    pub new_line_count: u32,
}

impl LineDiff {
    pub fn lines_changed(&self) -> u32 {
        self.hunks.iter().map(Hunk::changed).sum()
    }

    /// Edited lines in mutant coordinates. A pure deletion contributes the
    /// mutant line that now sits where the deleted text was.
    pub fn mutated_region(&self) -> BTreeSet<u32> {
        let mut region = BTreeSet::new();
        for h in &self.hunks {
            if h.new_len > 0 {
                region.extend(h.new_lines());
            } else if self.new_line_count > 0 {
                region.insert(h.new_start.clamp(1, self.new_line_count));
            }
        }
        region
    }

    /// Edited lines in original coordinates. A pure insertion contributes
    /// `anchor` when given, else the original line just after the insertion.
    pub fn original_region(&self, anchor: Option<u32>, old_line_count: u32) -> BTreeSet<u32> {
        let mut region = BTreeSet::new();
        for h in &self.hunks {
            if h.old_len > 0 {
                region.extend(h.old_lines());
            } else if let Some(a) = anchor {
                region.insert(a);
            } else if old_line_count > 0 {
                region.insert(h.old_start.clamp(1, old_line_count));
            }
        }
        region
    }
}

fn split_lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

/// Derive the line diff of `edits` against `original` by expanding each edit
/// to whole lines and trimming the unchanged prefix and suffix of each block.
pub fn line_diff(original: &str, edits: &[Edit]) -> LineDiff {
    let starts = line_starts(original);
    let old_lines = split_lines(original);
    let row_of = |byte: usize| match starts.binary_search(&byte) {
        Ok(i) => i,
        Err(i) => i - 1,
    };

    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.range.start, e.range.end));

    // Group edits into blocks of whole original rows.
    let mut blocks: Vec<(usize, usize, Vec<&Edit>)> = Vec::new();
    for e in sorted {
        let first = row_of(e.range.start).min(old_lines.len().saturating_sub(1));
        let ends_at_line_start =
            e.range.end > e.range.start && starts.binary_search(&e.range.end).is_ok();
        // Consuming a newline without putting one back joins the next row.
        let joins = if e.replacement.is_empty() {
            starts.binary_search(&e.range.start).is_err()
        } else {
            !e.replacement.ends_with('\n')
        };
        let last = if ends_at_line_start && !joins {
            row_of(e.range.end) - 1
        } else {
            row_of(e.range.end)
        };
        let last = last.min(old_lines.len().saturating_sub(1)).max(first);
        match blocks.last_mut() {
            Some((_, end, group)) if first <= *end => {
                *end = (*end).max(last);
                group.push(e);
            }
            _ => blocks.push((first, last, vec![e])),
        }
    }

    let mut hunks = Vec::new();
    let mut delta: i64 = 0;
    for (first, last, group) in blocks {
        let block_start = starts.get(first).copied().unwrap_or(original.len());
        let block_end = starts.get(last + 1).copied().unwrap_or(original.len());
        let old_block = &original[block_start..block_end];
        let local: Vec<Edit> = group
            .iter()
            .map(|e| {
                Edit::replace(
                    e.range.start - block_start..e.range.end - block_start,
                    e.replacement.clone(),
                )
            })
            .collect();
        let new_block = apply_edits(old_block, &local);
        let a = split_lines(old_block);
        let b = split_lines(&new_block);
        let mut prefix = 0;
        while prefix < a.len() && prefix < b.len() && a[prefix] == b[prefix] {
            prefix += 1;
        }
        let mut suffix = 0;
        while suffix < a.len() - prefix
            && suffix < b.len() - prefix
            && a[a.len() - 1 - suffix] == b[b.len() - 1 - suffix]
        {
            suffix += 1;
        }
        let old_len = a.len() - prefix - suffix;
        let new_len = b.len() - prefix - suffix;
        if old_len == 0 && new_len == 0 {
            continue;
        }
        let old_start = first + prefix + 1;
        let new_start = (old_start as i64 + delta) as usize;
        hunks.push(Hunk {
            old_start: old_start as u32,
            old_len: old_len as u32,
            new_start: new_start as u32,
            new_len: new_len as u32,
        });
        delta += new_len as i64 - old_len as i64;
    }

    let mut line_map = BTreeMap::new();
    let mut shift: i64 = 0;
    let mut next = hunks.iter().peekable();
    let mut row = 1u32;
    while (row as usize) <= old_lines.len() {
        if let Some(h) = next.peek() {
            if row == h.old_start {
                row += h.old_len;
                shift += h.new_len as i64 - h.old_len as i64;
                next.next();
                continue;
            }
        }
        line_map.insert(row, (row as i64 + shift) as u32);
        row += 1;
    }
    let new_line_count = (old_lines.len() as i64 + delta) as u32;
    LineDiff {
        hunks,
        line_map,
        new_line_count,
    }
}
