use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttributionRecord, ChurnReport, Classification, FailureBucket, Metrics};
use crate::corpus::LanguageTag;
use crate::generation::VariantLabel;
use crate::mutation::{Category, OperatorId};

/// What happened to one (program, variant) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantStatus {
    /// A suite was generated and executed; metrics are meaningful.
    Evaluated,
    /// Baseline suite did not pass 100% on the original.
    BaselineRejected,
    /// No usable suite after the repair budget.
    GenerationFailed,
    /// SAC mutant indistinguishable from the original on the screening inputs.
    PossiblyEquivalent,
    /// SPC mutant changed observable behaviour under the baseline suite.
    SpcRejected,
}

/// Raw per-variant result, one JSON line per (program, variant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub program_id: String,
    pub stratum: Option<u8>,
    pub model: String,
    pub language: LanguageTag,
    pub variant_label: VariantLabel,
    pub status: VariantStatus,
    pub metrics: Option<Metrics>,
    pub lines_changed: Option<u32>,
    pub bucket: Option<FailureBucket>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One cell per (model, language, category, operator).
    Operator,
    /// One cell per (model, language, category).
    Category,
}

impl Grouping {
    pub fn name(self) -> &'static str {
        match self {
            Grouping::Operator => "operator",
            Grouping::Category => "category",
        }
    }
}

/// One aggregate cell. Column order here is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub grouping: String,
    pub model: String,
    pub language: String,
    pub category: String,
    pub operator: String,
    pub variants: usize,
    pub evaluated: usize,
    pub mean_pass_rate: Option<f64>,
    pub mean_line_coverage: Option<f64>,
    pub mean_branch_coverage: Option<f64>,
    pub mean_n_tests: Option<f64>,
    pub mean_lines_changed: Option<f64>,
    pub failing_tests: usize,
    pub residually_aligned: usize,
    pub malformed: usize,
    pub unrelated_path: usize,
    pub residual_alignment_rate: Option<f64>,
    pub churn_reports: usize,
    pub mean_matched: Option<f64>,
    pub mean_new: Option<f64>,
    pub mean_lost: Option<f64>,
    pub mean_churn: Option<f64>,
    pub mean_match_rate: Option<f64>,
    pub possibly_equivalent: usize,
    pub spc_rejected: usize,
    pub generation_failed: usize,
    pub syntactic_environmental: usize,
    pub logical_assertion: usize,
}

fn category_name(label: VariantLabel) -> &'static str {
    match label.category() {
        None => "baseline",
        Some(Category::Sac) => "SAC",
        Some(Category::Spc) => "SPC",
    }
}

fn category_rank(label: VariantLabel) -> u8 {
    match label.category() {
        None => 0,
        Some(Category::Sac) => 1,
        Some(Category::Spc) => 2,
    }
}

fn operator_rank(label: VariantLabel) -> usize {
    label.operator().map_or(0, |op| {
        1 + OperatorId::ALL.iter().position(|&o| o == op).unwrap_or(0)
    })
}

/// Sort key: model, language, then baseline / SAC / SPC, then table order.
type CellKey = (String, String, u8, usize);

fn cell_key(
    grouping: Grouping,
    model: &str,
    language: LanguageTag,
    label: VariantLabel,
) -> CellKey {
    let op = match grouping {
        Grouping::Operator => operator_rank(label),
        Grouping::Category => 0,
    };
    (
        model.to_string(),
        language_name(language).to_string(),
        category_rank(label),
        op,
    )
}

fn language_name(language: LanguageTag) -> &'static str {
    match language {
        LanguageTag::Python => "python",
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Default)]
struct Cell<'a> {
    label: Option<VariantLabel>,
    evals: Vec<&'a EvaluationRecord>,
    attributions: Vec<&'a AttributionRecord>,
    churns: Vec<&'a ChurnReport>,
}

/// Unweighted per-variant means within each cell. Attribution records and
/// churn reports join their cell through the evaluation record of the same
/// (program, variant); ones without such a record are skipped.
pub fn aggregate(
    evaluations: &[EvaluationRecord],
    attributions: &[AttributionRecord],
    churns: &[ChurnReport],
    grouping: Grouping,
) -> Vec<AggregateRow> {
    let mut index: BTreeMap<(&str, VariantLabel), &EvaluationRecord> = BTreeMap::new();
    for e in evaluations {
        index.insert((e.program_id.as_str(), e.variant_label), e);
    }
    let mut cells: BTreeMap<CellKey, Cell> = BTreeMap::new();
    let cell_for = |e: &EvaluationRecord| cell_key(grouping, &e.model, e.language, e.variant_label);

    for e in evaluations {
        let cell = cells.entry(cell_for(e)).or_default();
        cell.label.get_or_insert(e.variant_label);
        cell.evals.push(e);
    }
    for a in attributions {
        match index.get(&(a.program_id.as_str(), VariantLabel::Mutant(a.operator))) {
            Some(e) => cells.entry(cell_for(e)).or_default().attributions.push(a),
            None => log::warn!(
                "attribution for {}/{} has no evaluation record",
                a.program_id,
                a.operator.name()
            ),
        }
    }
    for c in churns {
        match index.get(&(c.program_id.as_str(), c.variant_label)) {
            Some(e) => cells.entry(cell_for(e)).or_default().churns.push(c),
            None => log::warn!(
                "churn report for {}/{} has no evaluation record",
                c.program_id,
                c.variant_label
            ),
        }
    }

    cells
        .into_iter()
        .map(|((model, language, _, _), cell)| {
            let label = cell.label.expect("every cell holds an evaluation record");
            let evaluated: Vec<&Metrics> = cell
                .evals
                .iter()
                .filter(|e| e.status == VariantStatus::Evaluated)
                .filter_map(|e| e.metrics.as_ref())
                .collect();
            let over =
                |f: fn(&Metrics) -> f64| mean(&evaluated.iter().map(|m| f(m)).collect::<Vec<_>>());
            let lines: Vec<f64> = cell
                .evals
                .iter()
                .filter_map(|e| e.lines_changed)
                .map(f64::from)
                .collect();
            let count_status = |s| cell.evals.iter().filter(|e| e.status == s).count();
            let count_bucket = |b| cell.evals.iter().filter(|e| e.bucket == Some(b)).count();
            let count_class = |c| {
                cell.attributions
                    .iter()
                    .filter(|a| a.classification == c)
                    .count()
            };
            let churn_mean = |f: fn(&ChurnReport) -> f64| {
                mean(&cell.churns.iter().map(|c| f(c)).collect::<Vec<_>>())
            };
            let failing_tests = cell.attributions.len();
            let residually_aligned = count_class(Classification::ResiduallyAligned);
            AggregateRow {
                grouping: grouping.name().to_string(),
                model,
                language,
                category: category_name(label).to_string(),
                operator: match (grouping, label) {
                    (Grouping::Operator, VariantLabel::Mutant(op)) => op.name().to_string(),
                    (Grouping::Operator, VariantLabel::Baseline) => "baseline".to_string(),
                    (Grouping::Category, _) => "*".to_string(),
                },
                variants: cell.evals.len(),
                evaluated: evaluated.len(),
                mean_pass_rate: over(|m| m.pass_rate),
                mean_line_coverage: over(|m| m.line_coverage),
                mean_branch_coverage: over(|m| m.branch_coverage),
                mean_n_tests: over(|m| m.n_tests as f64),
                mean_lines_changed: mean(&lines),
                failing_tests,
                residually_aligned,
                malformed: count_class(Classification::Malformed),
                unrelated_path: count_class(Classification::UnrelatedPath),
                residual_alignment_rate: (failing_tests > 0)
                    .then(|| 100.0 * residually_aligned as f64 / failing_tests as f64),
                churn_reports: cell.churns.len(),
                mean_matched: churn_mean(|c| c.matched as f64),
                mean_new: churn_mean(|c| c.new as f64),
                mean_lost: churn_mean(|c| c.lost as f64),
                mean_churn: churn_mean(|c| c.churn as f64),
                mean_match_rate: churn_mean(|c| c.match_rate),
                possibly_equivalent: count_status(VariantStatus::PossiblyEquivalent),
                spc_rejected: count_status(VariantStatus::SpcRejected),
                generation_failed: count_status(VariantStatus::GenerationFailed),
                syntactic_environmental: count_bucket(FailureBucket::SyntacticEnvironmental),
                logical_assertion: count_bucket(FailureBucket::LogicalAssertion),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(pid: &str, label: VariantLabel, pass_rate: f64) -> EvaluationRecord {
        EvaluationRecord {
            program_id: pid.into(),
            stratum: Some(0),
            model: "m".into(),
            language: LanguageTag::Python,
            variant_label: label,
            status: VariantStatus::Evaluated,
            metrics: Some(Metrics {
                pass_rate,
                line_coverage: 50.0,
                branch_coverage: 40.0,
                n_tests: 10,
            }),
            lines_changed: label.operator().map(|_| 1),
            bucket: None,
        }
    }

    #[test]
    fn two_variants_average() {
        let label = VariantLabel::Mutant(OperatorId::BoundaryShift);
        let rows = aggregate(
            &[eval("a", label, 50.0), eval("b", label, 100.0)],
            &[],
            &[],
            Grouping::Operator,
        );
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_pass_rate, Some(75.0));
        assert_eq!(rows[0].operator, "BoundaryShift");
        assert_eq!(rows[0].mean_lines_changed, Some(1.0));
    }

    #[test]
    fn rows_follow_table_order() {
        let evals = [
            eval("a", VariantLabel::Mutant(OperatorId::RemoveComments), 1.0),
            eval("a", VariantLabel::Mutant(OperatorId::BoundaryShift), 1.0),
            eval("a", VariantLabel::Baseline, 100.0),
        ];
        let ops: Vec<String> = aggregate(&evals, &[], &[], Grouping::Operator)
            .into_iter()
            .map(|r| r.operator)
            .collect();
        assert_eq!(ops, ["baseline", "BoundaryShift", "RemoveComments"]);
        let cats: Vec<String> = aggregate(&evals, &[], &[], Grouping::Category)
            .into_iter()
            .map(|r| r.category)
            .collect();
        assert_eq!(cats, ["baseline", "SAC", "SPC"]);
    }

    #[test]
    fn excluded_variants_do_not_enter_means() {
        let label = VariantLabel::Mutant(OperatorId::ChangedArithmetic);
        let mut pe = eval("b", label, 0.0);
        pe.status = VariantStatus::PossiblyEquivalent;
        pe.metrics = None;
        let rows = aggregate(&[eval("a", label, 80.0), pe], &[], &[], Grouping::Operator);
        assert_eq!(rows[0].mean_pass_rate, Some(80.0));
        assert_eq!(
            (
                rows[0].variants,
                rows[0].evaluated,
                rows[0].possibly_equivalent
            ),
            (2, 1, 1)
        );
    }
}
