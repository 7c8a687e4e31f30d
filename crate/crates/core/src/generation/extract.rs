use tree_sitter::Node;

use super::{TestCase, TestSuite, VariantLabel};
use crate::python::{code_named_children, is_stdlib, PySource};

/// Modules a suite may import besides the standard library.
const ALLOWED_MODULES: [&str; 3] = ["pytest", "_pytest", "program_under_test"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("response contains no test code")]
    NoCodeFound,
    #[error("test code does not parse (line {line})")]
    UnparsableSuite { line: usize },
    #[error("test code imports `{module}`, which is outside the standard library")]
    ForbiddenDependency { module: String },
}

/// Fenced code blocks in order of appearance.
fn fenced_blocks(text: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        // Skip the info string (e.g. `python`).
        let Some(body_start) = after.find('\n') else {
            break;
        };
        let body = &after[body_start + 1..];
        let Some(close) = find_closing_fence(body) else {
            break;
        };
        blocks.push(&body[..close]);
        rest = &body[close + 3..];
    }
    blocks
}

/// A closing fence is ``` at the start of a line.
fn find_closing_fence(body: &str) -> Option<usize> {
    let mut offset = 0;
    for line in body.split_inclusive('\n') {
        if line.trim_start().starts_with("```") {
            return Some(offset + (line.len() - line.trim_start().len()));
        }
        offset += line.len();
    }
    None
}

fn is_test_function(src: &PySource, node: Node<'_>) -> Option<String> {
    let def = match node.kind() {
        "function_definition" => node,
        "decorated_definition" => node
            .child_by_field_name("definition")
            .filter(|d| d.kind() == "function_definition")?,
        _ => return None,
    };
    let name = src.node_text(def.child_by_field_name("name")?);
    name.starts_with("test").then(|| name.to_string())
}

/// Collect test cases the way pytest does by default: module-level
/// `test*` functions and `test*` methods of `Test*` classes. A redefined
/// name keeps its first position and its last body.
fn collect_cases(src: &PySource) -> Vec<TestCase> {
    let mut cases: Vec<TestCase> = Vec::new();
    let mut push = |name: String, node: Node<'_>| {
        let span = (node.start_byte(), node.end_byte());
        match cases.iter_mut().find(|c| c.name == name) {
            Some(existing) => existing.body_span = span,
            None => cases.push(TestCase {
                name,
                body_span: span,
            }),
        }
    };
    for stmt in code_named_children(src.root()) {
        if let Some(name) = is_test_function(src, stmt) {
            push(name, stmt);
            continue;
        }
        let class = match stmt.kind() {
            "class_definition" => stmt,
            "decorated_definition" => match stmt.child_by_field_name("definition") {
                Some(d) if d.kind() == "class_definition" => d,
                _ => continue,
            },
            _ => continue,
        };
        let Some(class_name) = class.child_by_field_name("name").map(|n| src.node_text(n)) else {
            continue;
        };
        if !class_name.starts_with("Test") {
            continue;
        }
        let Some(body) = class.child_by_field_name("body") else {
            continue;
        };
        for member in code_named_children(body) {
            if let Some(method) = is_test_function(src, member) {
                push(format!("{class_name}::{method}"), member);
            }
        }
    }
    cases
}

/// Extract the test suite from a model response.
pub fn extract_tests(
    response_text: &str,
    program_id: &str,
    variant_label: VariantLabel,
) -> Result<TestSuite, ExtractError> {
    let blocks = fenced_blocks(response_text);
    // Longest block wins; ties go to the first.
    let longest = blocks
        .iter()
        .copied()
        .reduce(|best, b| if b.len() > best.len() { b } else { best });
    let (code, fenced) = match longest {
        Some(block) => (block, true),
        None => (response_text, false),
    };
    if code.trim().is_empty() {
        return Err(ExtractError::NoCodeFound);
    }
    let src = match PySource::parse(code) {
        Ok(src) => src,
        Err(_) if !fenced => return Err(ExtractError::NoCodeFound),
        Err(e) => return Err(ExtractError::UnparsableSuite { line: e.line }),
    };
    for import in src.imports() {
        let top = import.module.split('.').next().unwrap_or_default();
        if import.relative || !(is_stdlib(&import.module) || ALLOWED_MODULES.contains(&top)) {
            return Err(ExtractError::ForbiddenDependency {
                module: import.module,
            });
        }
    }
    let cases = collect_cases(&src);
    if cases.is_empty() {
        return Err(ExtractError::NoCodeFound);
    }
    Ok(TestSuite {
        suite_source: code.to_string(),
        cases,
        program_id: program_id.to_string(),
        variant_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extract(text: &str) -> Result<TestSuite, ExtractError> {
        extract_tests(text, "p", VariantLabel::Baseline)
    }

    #[test]
    fn takes_longest_fenced_block() {
        let text = "Here:\n```python\nx = 1\n```\nand the suite:\n```python\nimport pytest\n\ndef test_a():\n    assert 1\n\n\
                    class TestB:\n    def test_c(self):\n        pass\n    def helper(self):\n        pass\n```\nDone.";
        let suite = extract(text).unwrap();
        assert_eq!(
            suite.case_names().collect::<Vec<_>>(),
            ["test_a", "TestB::test_c"]
        );
        assert!(suite.suite_source.starts_with("import pytest"));
        let (a, b) = suite.cases[0].body_span;
        assert_eq!(&suite.suite_source[a..b], "def test_a():\n    assert 1");
    }

    #[test]
    fn prose_only_is_no_code() {
        assert_eq!(
            extract("I cannot help with that."),
            Err(ExtractError::NoCodeFound)
        );
        assert_eq!(extract(""), Err(ExtractError::NoCodeFound));
    }

    #[test]
    fn unfenced_code_is_accepted() {
        let suite = extract("def test_x():\n    assert True\n").unwrap();
        assert_eq!(suite.len(), 1);
    }

    #[test]
    fn broken_fenced_code_is_unparsable() {
        let err = extract("```python\ndef test_x(:\n    pass\n```").unwrap_err();
        assert!(matches!(err, ExtractError::UnparsableSuite { .. }));
    }

    #[test]
    fn third_party_imports_are_forbidden() {
        let err =
            extract("```python\nimport numpy as np\n\ndef test_x():\n    pass\n```").unwrap_err();
        assert_eq!(
            err,
            ExtractError::ForbiddenDependency {
                module: "numpy".into()
            }
        );
        assert!(extract(
            "```python\nimport os.path\nfrom unittest import mock\n\ndef test_x():\n    pass\n```"
        )
        .is_ok());
    }

    #[test]
    fn seven_tests_are_seven_cases() {
        let body: String = (1..=7)
            .map(|i| format!("def test_{i}():\n    assert {i}\n\n"))
            .collect();
        let suite = extract(&format!("```python\n{body}```")).unwrap();
        assert_eq!(suite.len(), 7);
    }

    #[test]
    fn redefinition_keeps_one_case() {
        let suite = extract(
            "def test_a():\n    pass\n\ndef test_b():\n    pass\n\ndef test_a():\n    assert 0\n",
        )
        .unwrap();
        assert_eq!(suite.case_names().collect::<Vec<_>>(), ["test_a", "test_b"]);
        let (a, b) = suite.cases[0].body_span;
        assert!(suite.suite_source[a..b].contains("assert 0"));
    }
}
