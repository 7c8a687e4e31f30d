use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::execution::ExecutionReport;
use crate::generation::VariantLabel;
use crate::mutation::CodeChange;

pub type Profile = BTreeSet<u32>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "{case}: covered mutant line {line} has no original counterpart and is not part of an edit"
)]
pub struct CoordinateError {
    pub case: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChurnReport {
    pub program_id: String,
    pub variant_label: VariantLabel,
    pub matched: usize,
    pub new: usize,
    pub lost: usize,
    pub churn: usize,
    pub match_rate: f64,
    /// (baseline case, variant case) pairs.
    pub pairs: Vec<(String, String)>,
    pub baseline_coverage_profile: BTreeMap<String, Profile>,
    pub variant_coverage_profile: BTreeMap<String, Profile>,
}

impl ChurnReport {
    pub fn baseline_size(&self) -> usize {
        self.baseline_coverage_profile.len()
    }

    pub fn variant_size(&self) -> usize {
        self.variant_coverage_profile.len()
    }

    pub fn conserves(&self) -> bool {
        self.matched + self.lost == self.baseline_size()
            && self.matched + self.new == self.variant_size()
            && self.churn == self.new + self.lost
            && (0.0..=100.0).contains(&self.match_rate)
    }
}

/// Pair tests whose covered lines, in original coordinates, are equal.
///
/// `change` is the edit that turned the original into the variant's program;
/// `None` means the variant ran on the original itself. Lines inside edited
/// spans are dropped from both sides. Equal profiles form classes, and within
/// a class tests pair up in name order, which is a maximum matching under
/// set equality.
pub fn match_tests(
    baseline: &ExecutionReport,
    variant: &ExecutionReport,
    variant_label: VariantLabel,
    change: Option<&CodeChange>,
) -> Result<ChurnReport, CoordinateError> {
    let (edited_original, edited_mutant, inverse) = match change {
        Some(c) => (
            c.edited_original_lines(),
            c.edited_mutant_lines(),
            Some(c.inverse_line_map()),
        ),
        None => Default::default(),
    };

    let baseline_profile: BTreeMap<String, Profile> = baseline
        .verdicts
        .iter()
        .map(|v| {
            (
                v.case_name.clone(),
                v.covered_lines
                    .difference(&edited_original)
                    .copied()
                    .collect(),
            )
        })
        .collect();

    let mut variant_profile = BTreeMap::new();
    for v in &variant.verdicts {
        let mut mapped = Profile::new();
        for &line in &v.covered_lines {
            if edited_mutant.contains(&line) {
                continue;
            }
            match &inverse {
                None => {
                    mapped.insert(line);
                }
                Some(inv) => {
                    let original = inv.get(&line).ok_or(CoordinateError {
                        case: v.case_name.clone(),
                        line,
                    })?;
                    mapped.insert(*original);
                }
            }
        }
        variant_profile.insert(v.case_name.clone(), mapped);
    }

    let classes = |profiles: &BTreeMap<String, Profile>| {
        let mut by: BTreeMap<Profile, Vec<String>> = BTreeMap::new();
        // BTreeMap iteration is name-ordered, so each class list is sorted.
        for (name, p) in profiles {
            by.entry(p.clone()).or_default().push(name.clone());
        }
        by
    };
    let base_classes = classes(&baseline_profile);
    let var_classes = classes(&variant_profile);
    let mut pairs = Vec::new();
    for (profile, base_names) in &base_classes {
        if let Some(var_names) = var_classes.get(profile) {
            pairs.extend(base_names.iter().cloned().zip(var_names.iter().cloned()));
        }
    }
    pairs.sort();

    let matched = pairs.len();
    let lost = baseline_profile.len() - matched;
    let new = variant_profile.len() - matched;
    let match_rate = if baseline_profile.is_empty() {
        0.0
    } else {
        100.0 * matched as f64 / baseline_profile.len() as f64
    };
    Ok(ChurnReport {
        program_id: change.map_or_else(|| baseline.program_ref.clone(), |c| c.program_id.clone()),
        variant_label,
        matched,
        new,
        lost,
        churn: new + lost,
        match_rate,
        pairs,
        baseline_coverage_profile: baseline_profile,
        variant_coverage_profile: variant_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::{TestStatus, TestVerdict};
    use crate::mutation::{first_change, OperatorId};

    fn report(tests: &[(&str, &[u32])]) -> ExecutionReport {
        let verdicts = tests
            .iter()
            .map(|(n, lines)| TestVerdict {
                case_name: n.to_string(),
                status: TestStatus::Pass,
                message: String::new(),
                covered_lines: lines.iter().copied().collect(),
                partial_coverage: false,
            })
            .collect();
        ExecutionReport::new("p", "s", verdicts, 0.0, 0.0, BTreeSet::new())
    }

    #[test]
    fn identity_matches_everything() {
        let r = report(&[("a", &[1, 2]), ("b", &[1, 2]), ("c", &[1, 3])]);
        let c = match_tests(&r, &r, VariantLabel::Baseline, None).unwrap();
        assert_eq!((c.matched, c.new, c.lost, c.churn), (3, 0, 0, 0));
        assert_eq!(c.match_rate, 100.0);
    }

    #[test]
    fn one_changed_profile() {
        let b = report(&[("A", &[1, 2]), ("B", &[1, 3]), ("C", &[1, 4])]);
        let v = report(&[("x", &[1, 2]), ("y", &[1, 3]), ("z", &[1, 5])]);
        let c = match_tests(&b, &v, VariantLabel::Baseline, None).unwrap();
        assert_eq!((c.matched, c.new, c.lost, c.churn), (2, 1, 1, 2));
        assert_eq!(format!("{:.1}", c.match_rate), "66.7");
        assert_eq!(
            c.pairs,
            vec![("A".into(), "x".into()), ("B".into(), "y".into())]
        );
    }

    #[test]
    fn inserted_lines_are_mapped_back() {
        let src = "n = int(input())\nprint(n)\n";
        let change = first_change("p", src, OperatorId::VoidLoopInjection, 0)
            .unwrap()
            .unwrap();
        // Mutant: line 1 is the injected loop, original lines shift by one.
        let b = report(&[("t", &[1, 2])]);
        let v = report(&[("t", &[1, 2, 3])]);
        let c = match_tests(
            &b,
            &v,
            VariantLabel::Mutant(OperatorId::VoidLoopInjection),
            Some(&change),
        )
        .unwrap();
        assert_eq!(c.matched, 1);
    }

    #[test]
    fn unmapped_line_is_a_coordinate_error() {
        let src = "n = int(input())\nprint(n)\n";
        let change = first_change("p", src, OperatorId::VoidLoopInjection, 0)
            .unwrap()
            .unwrap();
        let b = report(&[("t", &[1])]);
        let v = report(&[("t", &[9])]);
        let err = match_tests(&b, &v, VariantLabel::Baseline, Some(&change)).unwrap_err();
        assert_eq!(err.line, 9);
    }
}
