//! Python syntax support: a thin layer over the tree-sitter grammar that the
//! corpus filter, the mutation operators and the test extractor share.

mod stdlib;

pub use stdlib::is_stdlib;

use std::ops::Range;

use tree_sitter::{Node, Parser, Tree};

/// A syntax error located at a 1-based line and 0-based byte column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
}

/// Parsed Python source. Owns both the text and its concrete syntax tree.
pub struct PySource {
    text: String,
    tree: Tree,
}

impl std::fmt::Debug for PySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PySource")
            .field("bytes", &self.text.len())
            .finish()
    }
}

fn parser() -> Parser {
    let mut parser = Parser::new();
    parser
        .set_language(&tree_sitter_python::LANGUAGE.into())
        .expect("python grammar is ABI compatible with the linked tree-sitter");
    parser
}

impl PySource {
    /// Parse and reject any source containing error or missing nodes.
    pub fn parse(text: impl Into<String>) -> Result<Self, SyntaxError> {
        let source = Self::parse_lenient(text);
        match source.first_error() {
            Some(err) => Err(err),
            None => Ok(source),
        }
    }

    /// Parse without rejecting syntax errors.
    pub fn parse_lenient(text: impl Into<String>) -> Self {
        let text = text.into();
        let tree = parser()
            .parse(&text, None)
            .expect("parser has a language and no cancellation flag");
        Self { text, tree }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn node_text(&self, node: Node<'_>) -> &str {
        &self.text[node.byte_range()]
    }

    pub fn first_error(&self) -> Option<SyntaxError> {
        let root = self.root();
        if !root.has_error() {
            return None;
        }
        preorder(root)
            .into_iter()
            .find(|n| n.is_error() || n.is_missing())
            .map(|n| SyntaxError {
                line: n.start_position().row + 1,
                column: n.start_position().column,
            })
            .or(Some(SyntaxError { line: 1, column: 0 }))
    }

    /// Number of lines in the text, counting a final unterminated line.
    pub fn line_count(&self) -> usize {
        line_count(&self.text)
    }

    /// Byte offset at which 0-based `row` begins.
    pub fn line_start(&self, row: usize) -> usize {
        line_starts(&self.text)
            .get(row)
            .copied()
            .unwrap_or(self.text.len())
    }

    /// Leading whitespace of the line containing `byte`.
    pub fn indent_at(&self, byte: usize) -> &str {
        let start = self.text[..byte].rfind('\n').map_or(0, |i| i + 1);
        let line = &self.text[start..];
        let width = line.len() - line.trim_start_matches([' ', '\t']).len();
        &line[..width]
    }

    /// True if `node` is the first non-whitespace token on its line.
    pub fn starts_line(&self, node: Node<'_>) -> bool {
        let start = node.start_byte();
        let line_start = self.text[..start].rfind('\n').map_or(0, |i| i + 1);
        self.text[line_start..start].trim().is_empty()
    }

    /// True if `node` is the last non-whitespace, non-comment content on its final line.
    pub fn ends_line(&self, node: Node<'_>) -> bool {
        let end = node.end_byte();
        let rest = &self.text[end..];
        let line_rest = rest.split('\n').next().unwrap_or("");
        let trimmed = line_rest.trim();
        trimmed.is_empty() || trimmed.starts_with('#')
    }

    /// Every identifier token text in the program, including those nested in f-strings.
    pub fn identifiers(&self) -> Vec<&str> {
        preorder(self.root())
            .into_iter()
            .filter(|n| n.kind() == "identifier")
            .map(|n| self.node_text(n))
            .collect()
    }

    /// Modules named by `import` and `from ... import` statements.
    pub fn imports(&self) -> Vec<ImportRef> {
        let mut out = Vec::new();
        for node in preorder(self.root()) {
            let line = node.start_position().row + 1;
            match node.kind() {
                "import_statement" => {
                    let mut cursor = node.walk();
                    for name in node.children_by_field_name("name", &mut cursor) {
                        let dotted = if name.kind() == "aliased_import" {
                            name.child_by_field_name("name").unwrap_or(name)
                        } else {
                            name
                        };
                        out.push(ImportRef {
                            module: self.node_text(dotted).to_string(),
                            line,
                            relative: false,
                        });
                    }
                }
                "import_from_statement" => {
                    if let Some(module) = node.child_by_field_name("module_name") {
                        out.push(ImportRef {
                            module: self.node_text(module).trim_start_matches('.').to_string(),
                            line,
                            relative: module.kind() == "relative_import",
                        });
                    }
                }
                _ => {}
            }
        }
        out
    }
}

/// One imported module reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportRef {
    pub module: String,
    pub line: usize,
    pub relative: bool,
}

/// Pre-order (document order) traversal of every node below and including `root`.
pub fn preorder(root: Node<'_>) -> Vec<Node<'_>> {
    let mut out = Vec::new();
    let mut cursor = root.walk();
    loop {
        out.push(cursor.node());
        if cursor.goto_first_child() {
            continue;
        }
        loop {
            if cursor.goto_next_sibling() {
                break;
            }
            if !cursor.goto_parent() {
                return out;
            }
        }
    }
}

/// Named children of `node` in order.
pub fn named_children(node: Node<'_>) -> Vec<Node<'_>> {
    let mut cursor = node.walk();
    node.named_children(&mut cursor).collect()
}

/// Named children of `node` other than comments.
pub fn code_named_children(node: Node<'_>) -> Vec<Node<'_>> {
    named_children(node)
        .into_iter()
        .filter(|c| c.kind() != "comment")
        .collect()
}

/// Anonymous-or-named children of `node` in order.
pub fn children(node: Node<'_>) -> Vec<Node<'_>> {
    let mut cursor = node.walk();
    node.children(&mut cursor).collect()
}

/// Is `node` a statement that can occupy a line of a block?
pub fn is_statement(node: Node<'_>) -> bool {
    matches!(
        node.kind(),
        "expression_statement"
            | "return_statement"
            | "pass_statement"
            | "break_statement"
            | "continue_statement"
            | "delete_statement"
            | "raise_statement"
            | "assert_statement"
            | "global_statement"
            | "nonlocal_statement"
            | "import_statement"
            | "import_from_statement"
            | "future_import_statement"
            | "print_statement"
            | "exec_statement"
            | "type_alias_statement"
            | "if_statement"
            | "for_statement"
            | "while_statement"
            | "try_statement"
            | "with_statement"
            | "function_definition"
            | "class_definition"
            | "decorated_definition"
            | "match_statement"
    )
}

pub fn line_starts(text: &str) -> Vec<usize> {
    std::iter::once(0)
        .chain(text.match_indices('\n').map(|(i, _)| i + 1))
        .collect()
}

pub fn line_count(text: &str) -> usize {
    if text.is_empty() {
        return 0;
    }
    let newlines = text.matches('\n').count();
    if text.ends_with('\n') {
        newlines
    } else {
        newlines + 1
    }
}

/// Byte range of 0-based `row`, excluding its newline.
pub fn line_range(text: &str, row: usize) -> Range<usize> {
    let starts = line_starts(text);
    let start = starts.get(row).copied().unwrap_or(text.len());
    let end = text[start..].find('\n').map_or(text.len(), |i| start + i);
    start..end
}
