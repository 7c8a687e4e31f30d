use serde::{Deserialize, Serialize};

use super::TestVerdict;
use crate::mutation::CodeChange;

/// Which program version a verdict was produced on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Version {
    Original,
    Mutant,
}

/// Did the test execute the changed region? On the mutant the region is the
/// edited lines themselves; on the original it is their pre-image, with pure
/// insertions attributed to the operator's anchor line.
pub fn covers_region(verdict: &TestVerdict, change: &CodeChange, on: Version) -> bool {
    let region = match on {
        Version::Mutant => &change.mutated_region,
        Version::Original => &change.original_region,
    };
    region
        .iter()
        .any(|line| verdict.covered_lines.contains(line))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::TestStatus;
    use crate::mutation::{first_change, OperatorId};

    fn covering(lines: &[u32]) -> TestVerdict {
        TestVerdict {
            case_name: "t".into(),
            status: TestStatus::Pass,
            message: String::new(),
            covered_lines: lines.iter().copied().collect(),
            partial_coverage: false,
        }
    }

    #[test]
    fn edit_on_untaken_branch_is_not_covered() {
        let src = "x = int(input())\nif x > 0:\n    print(x)\nelse:\n    print(-x + 1)\n";
        let change = first_change("p", src, OperatorId::ChangedArithmetic, 0)
            .unwrap()
            .unwrap();
        assert_eq!(change.mutated_region, [5].into());
        assert!(!covers_region(
            &covering(&[1, 2, 3]),
            &change,
            Version::Mutant
        ));
        assert!(covers_region(
            &covering(&[1, 2, 4, 5]),
            &change,
            Version::Mutant
        ));
    }

    #[test]
    fn insertion_pulls_back_to_anchor() {
        let src = "n = 1\nif n:\n    print(n)\n";
        let change = first_change("p", src, OperatorId::MisleadingComments, 0)
            .unwrap()
            .unwrap();
        // Comment lands on mutant line 2; the original anchor is the `if` line.
        assert_eq!(change.mutated_region, [2].into());
        assert!(covers_region(
            &covering(&[1, 2, 3]),
            &change,
            Version::Original
        ));
        assert!(!covers_region(&covering(&[1]), &change, Version::Original));
    }
}
