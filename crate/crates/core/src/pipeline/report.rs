use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::{RunManifest, MANIFEST_FILE};
use super::stages::{Selection, ATTRIBUTION_JSONL, CHURN_JSONL, EVALUATION_JSONL};
use super::{IoContext, PipelineError, Run};
use crate::analysis::{
    aggregate, AggregateRow, AttributionRecord, ChurnReport, EvaluationRecord, Grouping,
};
use crate::corpus::CorpusManifest;
use crate::generation::VariantLabel;
use crate::util::{read_json, read_json_lines, write_atomic, write_json};

pub const SUMMARY_MD: &str = "summary.md";
pub const METRICS_CSV: &str = "metrics.csv";
pub const ATTRIBUTION_CSV: &str = "attribution.csv";
pub const CHURN_CSV: &str = "churn.csv";

/// One row of `churn.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChurnRow {
    pub program_id: String,
    pub variant_label: VariantLabel,
    pub baseline_tests: usize,
    pub variant_tests: usize,
    pub matched: usize,
    pub new: usize,
    pub lost: usize,
    pub churn: usize,
    pub match_rate: f64,
}

impl From<&ChurnReport> for ChurnRow {
    fn from(c: &ChurnReport) -> Self {
        Self {
            program_id: c.program_id.clone(),
            variant_label: c.variant_label,
            baseline_tests: c.baseline_size(),
            variant_tests: c.variant_size(),
            matched: c.matched,
            new: c.new,
            lost: c.lost,
            churn: c.churn,
            match_rate: c.match_rate,
        }
    }
}

fn csv_bytes<T: Serialize>(rows: &[T], header: &[&str]) -> Vec<u8> {
    // Headers come from the column list rather than the first record, so an
    // empty table still has them.
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub const METRICS_COLUMNS: [&str; 28] = [
    "grouping",
    "model",
    "language",
    "category",
    "operator",
    "variants",
    "evaluated",
    "mean_pass_rate",
    "mean_line_coverage",
    "mean_branch_coverage",
    "mean_n_tests",
    "mean_lines_changed",
    "failing_tests",
    "residually_aligned",
    "malformed",
    "unrelated_path",
    "residual_alignment_rate",
    "churn_reports",
    "mean_matched",
    "mean_new",
    "mean_lost",
    "mean_churn",
    "mean_match_rate",
    "possibly_equivalent",
    "spc_rejected",
    "generation_failed",
    "syntactic_environmental",
    "logical_assertion",
];

const ATTRIBUTION_COLUMNS: [&str; 7] = [
    "program_id",
    "operator",
    "case_name",
    "fails_on_mutant",
    "passes_on_original",
    "covers_region_mutant",
    "classification",
];

const CHURN_COLUMNS: [&str; 9] = [
    "program_id",
    "variant_label",
    "baseline_tests",
    "variant_tests",
    "matched",
    "new",
    "lost",
    "churn",
    "match_rate",
];

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "–".to_string(), |v| format!("{v:.1}"))
}

fn no_data(out: &mut String, cols: usize, what: &str) {
    let _ = writeln!(
        out,
        "| {what} | no data |{}",
        " |".repeat(cols.saturating_sub(2))
    );
}

fn summary(
    manifest: &RunManifest,
    corpus: &CorpusManifest,
    selection: &Selection,
    by_operator: &[AggregateRow],
    by_category: &[AggregateRow],
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# testdrift report\n");
    let _ = writeln!(s, "- run: `{}`", manifest.run_id);
    let _ = writeln!(s, "- manifest digest: `{}`", manifest.digest());
    let _ = writeln!(s, "- template hash: `{}`", manifest.template_hash);
    let _ = writeln!(
        s,
        "- corpus: {} programs accepted, {} rejected at ingestion; LOC band boundaries {:?}",
        corpus.programs.len(),
        corpus.rejections.len(),
        corpus.boundaries
    );
    let _ = writeln!(
        s,
        "- baseline selection: {} of {} target ({} per band); passed per band {:?}, attempted per band {:?}",
        selection.selected.len(),
        selection.quota.total_target(),
        selection.quota.per_band_target,
        selection.quota.passed_per_band,
        selection.quota.attempts_per_band
    );
    if !selection.short_bands.is_empty() {
        let _ = writeln!(s, "- bands short of quota: {:?}", selection.short_bands);
    }

    s.push_str(
        "\n## Method notes\n\n\
         - Site selection: each operator is applied at its first site in a fixed, \
           documented order; one variant per (program, operator).\n\
         - Screening: SAC variants that pass the baseline suite and agree with the \
           original on a seeded pool of 32 small inputs are counted as possibly \
           equivalent and excluded. SPC variants that break any baseline test are \
           rejected and excluded.\n\
         - Failure attribution: a failing test (fail, error or timeout) is residually \
           aligned when it passes alone on the original and its coverage on the mutant \
           touches an edited line; malformed when it also fails on the original; \
           otherwise unrelated-path. Pure insertions are attributed to the operator's \
           anchor line on the original.\n\
         - Matching: two tests match when their covered-line sets, in original-line \
           coordinates with edited lines removed from both sides, are equal. Tests with \
           equal profiles pair up in name order.\n\
         - Means are unweighted over variants; empty cells are printed as `–`.\n",
    );

    let header = "| category | operator | variants | evaluated | pass rate | line cov | branch cov | tests | lines changed |\n\
                  |---|---|---:|---:|---:|---:|---:|---:|---:|\n";
    s.push_str("\n## Suite quality by operator\n\n");
    s.push_str(header);
    for cat in ["baseline", "SAC", "SPC"] {
        let rows: Vec<&AggregateRow> = by_operator.iter().filter(|r| r.category == cat).collect();
        if rows.is_empty() {
            no_data(&mut s, 9, cat);
        }
        for r in rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.category,
                r.operator,
                r.variants,
                r.evaluated,
                pct(r.mean_pass_rate),
                pct(r.mean_line_coverage),
                pct(r.mean_branch_coverage),
                pct(r.mean_n_tests),
                pct(r.mean_lines_changed)
            );
        }
    }

    s.push_str("\n## Suite quality by category\n\n");
    s.push_str(header);
    for cat in ["baseline", "SAC", "SPC"] {
        match by_category.iter().find(|r| r.category == cat) {
            None => no_data(&mut s, 9, cat),
            Some(r) => {
                let _ = writeln!(
                    s,
                    "| {} | * | {} | {} | {} | {} | {} | {} | {} |",
                    r.category,
                    r.variants,
                    r.evaluated,
                    pct(r.mean_pass_rate),
                    pct(r.mean_line_coverage),
                    pct(r.mean_branch_coverage),
                    pct(r.mean_n_tests),
                    pct(r.mean_lines_changed)
                );
            }
        }
    }

    s.push_str("\n## Failure attribution (SAC)\n\n");
    s.push_str(
        "| operator | failing tests | residually aligned | malformed | unrelated path | residual alignment % | possibly equivalent |\n\
         |---|---:|---:|---:|---:|---:|---:|\n",
    );
    let sac: Vec<&AggregateRow> = by_operator.iter().filter(|r| r.category == "SAC").collect();
    if sac.is_empty() {
        no_data(&mut s, 7, "SAC");
    }
    for r in sac
        .iter()
        .copied()
        .chain(by_category.iter().filter(|r| r.category == "SAC"))
    {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.operator,
            r.failing_tests,
            r.residually_aligned,
            r.malformed,
            r.unrelated_path,
            pct(r.residual_alignment_rate),
            r.possibly_equivalent
        );
    }

    s.push_str("\n## Test churn against the baseline suite\n\n");
    s.push_str(
        "| category | operator | reports | matched | new | lost | churn | match rate |\n\
         |---|---|---:|---:|---:|---:|---:|---:|\n",
    );
    let mutant_rows: Vec<&AggregateRow> = by_operator
        .iter()
        .filter(|r| r.category != "baseline")
        .collect();
    if mutant_rows.is_empty() {
        no_data(&mut s, 8, "SAC/SPC");
    }
    for r in mutant_rows
        .into_iter()
        .chain(by_category.iter().filter(|r| r.category != "baseline"))
    {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            r.category,
            r.operator,
            r.churn_reports,
            pct(r.mean_matched),
            pct(r.mean_new),
            pct(r.mean_lost),
            pct(r.mean_churn),
            pct(r.mean_match_rate)
        );
    }

    s.push_str("\n## Excluded variants and generation failures\n\n");
    s.push_str(
        "| category | spc rejected | generation failed | syntactic/environmental | logical assertion |\n\
         |---|---:|---:|---:|---:|\n",
    );
    for cat in ["baseline", "SAC", "SPC"] {
        match by_category.iter().find(|r| r.category == cat) {
            None => no_data(&mut s, 5, cat),
            Some(r) => {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} |",
                    r.category,
                    r.spc_rejected,
                    r.generation_failed,
                    r.syntactic_environmental,
                    r.logical_assertion
                );
            }
        }
    }
    s
}

/// Paths of the files [`emit_report`] writes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub summary: std::path::PathBuf,
    pub metrics: std::path::PathBuf,
    pub attribution: std::path::PathBuf,
    pub churn: std::path::PathBuf,
    pub manifest: std::path::PathBuf,
}

/// Aggregate the raw results of `run_dir` into `out_dir`.
pub fn emit_report(run_dir: &Path, out_dir: &Path) -> Result<ReportFiles, PipelineError> {
    fn lines<T: serde::de::DeserializeOwned>(
        run_dir: &Path,
        rel: &str,
    ) -> Result<Vec<T>, PipelineError> {
        let p = run_dir.join(rel);
        read_json_lines(&p).at(&p)
    }
    let evaluations: Vec<EvaluationRecord> = lines(run_dir, EVALUATION_JSONL)?;
    let attributions: Vec<AttributionRecord> = lines(run_dir, ATTRIBUTION_JSONL)?;
    let churns: Vec<ChurnReport> = lines(run_dir, CHURN_JSONL)?;
    let manifest_path = run_dir.join(MANIFEST_FILE);
    let manifest: RunManifest = read_json(&manifest_path).at(&manifest_path)?;
    let corpus_path = run_dir.join("corpus/manifest.json");
    let corpus: CorpusManifest = read_json(&corpus_path).at(&corpus_path)?;
    let selection_path = run_dir.join("baseline/selection.json");
    let selection: Selection = read_json(&selection_path).at(&selection_path)?;

    let by_operator = aggregate(&evaluations, &attributions, &churns, Grouping::Operator);
    let by_category = aggregate(&evaluations, &attributions, &churns, Grouping::Category);
    let rows: Vec<&AggregateRow> = by_operator.iter().chain(&by_category).collect();
    let churn_rows: Vec<ChurnRow> = churns.iter().map(ChurnRow::from).collect();

    let files = ReportFiles {
        summary: out_dir.join(SUMMARY_MD),
        metrics: out_dir.join(METRICS_CSV),
        attribution: out_dir.join(ATTRIBUTION_CSV),
        churn: out_dir.join(CHURN_CSV),
        manifest: out_dir.join(MANIFEST_FILE),
    };
    let write = |path: &Path, bytes: &[u8]| write_atomic(path, bytes).at(path);
    write(&files.metrics, &csv_bytes(&rows, &METRICS_COLUMNS))?;
    write(
        &files.attribution,
        &csv_bytes(&attributions, &ATTRIBUTION_COLUMNS),
    )?;
    write(&files.churn, &csv_bytes(&churn_rows, &CHURN_COLUMNS))?;
    write(
        &files.summary,
        summary(&manifest, &corpus, &selection, &by_operator, &by_category).as_bytes(),
    )?;
    write_json(&files.manifest, &manifest).at(&files.manifest)?;
    Ok(files)
}

pub(super) fn report_stage(run: &mut Run) -> Result<(), PipelineError> {
    let tmp = run.path(".report.partial");
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp).at(&tmp)?;
    }
    emit_report(&run.dir, &tmp)?;
    let dest = run.path("report");
    if dest.exists() {
        std::fs::remove_dir_all(&dest).at(&dest)?;
    }
    std::fs::rename(&tmp, &dest).at(&dest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tables_still_have_headers() {
        let bytes = csv_bytes::<ChurnRow>(&[], &CHURN_COLUMNS);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            CHURN_COLUMNS.join(",") + "\n"
        );
    }

    #[test]
    fn metric_columns_match_the_row_type() {
        let row = AggregateRow {
            grouping: "operator".into(),
            model: "m".into(),
            language: "python".into(),
            category: "SAC".into(),
            operator: "BoundaryShift".into(),
            variants: 1,
            evaluated: 1,
            mean_pass_rate: Some(200.0 / 3.0),
            mean_line_coverage: None,
            mean_branch_coverage: None,
            mean_n_tests: None,
            mean_lines_changed: Some(1.0),
            failing_tests: 0,
            residually_aligned: 0,
            malformed: 0,
            unrelated_path: 0,
            residual_alignment_rate: None,
            churn_reports: 0,
            mean_matched: None,
            mean_new: None,
            mean_lost: None,
            mean_churn: None,
            mean_match_rate: None,
            possibly_equivalent: 0,
            spc_rejected: 0,
            generation_failed: 0,
            syntactic_environmental: 0,
            logical_assertion: 0,
        };
        let text = String::from_utf8(csv_bytes(&[&row], &METRICS_COLUMNS)).unwrap();
        assert_eq!(text.lines().next().unwrap(), METRICS_COLUMNS.join(","));
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let back: AggregateRow = r.deserialize().next().unwrap().unwrap();
        assert_eq!(back, row);
    }
}
