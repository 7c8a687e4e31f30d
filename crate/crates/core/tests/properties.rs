use std::collections::BTreeSet;

use proptest::prelude::*;
use testdrift::analysis::match_tests;
use testdrift::corpus::{stratify, EntryMode, SeedProgram};
use testdrift::execution::{ExecutionReport, TestStatus, TestVerdict};
use testdrift::generation::VariantLabel;
use testdrift::mutation::edit::{apply_edits, line_diff, Edit};
use testdrift::mutation::{first_change, Category, OperatorId};
use testdrift::python::PySource;

fn text_lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n')
        .map(|l| l.trim_end_matches('\n'))
        .collect()
}

/// A small text plus non-overlapping edits over it.
fn text_and_edits() -> impl Strategy<Value = (String, Vec<Edit>)> {
    prop::collection::vec("[ab]{0,3}", 1..8)
        .prop_map(|lines| lines.join("\n") + "\n")
        .prop_flat_map(|text| {
            let len = text.len();
            let cuts = prop::collection::btree_set(0..=len, 0..6);
            let texts = prop::collection::vec("[xy\n]{0,4}", 6);
            (Just(text), cuts, texts)
        })
        .prop_map(|(text, cuts, texts)| {
            let cuts: Vec<usize> = cuts.into_iter().collect();
            let edits = cuts
                .chunks(2)
                .zip(texts)
                .map(|(pair, repl)| match *pair {
                    [a, b] => Edit::replace(a..b, repl),
                    [a] => Edit::insert(a, repl),
                    _ => unreachable!(),
                })
                .collect();
            (text, edits)
        })
}

proptest! {
    #[test]
    fn line_map_links_identical_lines_in_order((text, edits) in text_and_edits()) {
        let new = apply_edits(&text, &edits);
        let diff = line_diff(&text, &edits);
        let (old_l, new_l) = (text_lines(&text), text_lines(&new));
        let mut prev = 0;
        for (&o, &m) in &diff.line_map {
            prop_assert_eq!(old_l[o as usize - 1], new_l[m as usize - 1]);
            prop_assert!(m > prev);
            prev = m;
        }
        // Every line is either mapped or inside a hunk, on both sides.
        for o in 1..=old_l.len() as u32 {
            let in_hunk = diff.hunks.iter().any(|h| h.old_lines().contains(&o));
            prop_assert!(diff.line_map.contains_key(&o) != in_hunk, "old line {}", o);
        }
        let targets: BTreeSet<u32> = diff.line_map.values().copied().collect();
        for m in 1..=new_l.len() as u32 {
            let in_hunk = diff.hunks.iter().any(|h| h.new_lines().contains(&m));
            prop_assert!(targets.contains(&m) != in_hunk, "new line {}", m);
        }
        prop_assert_eq!(diff.lines_changed(), diff.hunks.iter().map(|h| h.old_len.max(h.new_len)).sum::<u32>());
        prop_assert!(diff.mutated_region().iter().all(|&l| l >= 1 && l <= diff.new_line_count.max(1)));
    }

    #[test]
    fn bands_partition_the_corpus(locs in prop::collection::vec(1usize..40, 4..80)) {
        let mut programs: Vec<SeedProgram> = locs
            .iter()
            .enumerate()
            .map(|(i, &loc)| SeedProgram {
                id: format!("p{i:02}"),
                source_path: Default::default(),
                loc,
                stratum: None,
                entry_mode: EntryMode::StdinScript,
            })
            .collect();
        let a = stratify(&mut programs).unwrap();
        let sizes: Vec<usize> = a.members.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(sizes.iter().sum::<usize>(), programs.len());
        // Bands are ordered by LOC: nothing in a band is longer than anything in a higher one.
        for p in &programs {
            let band = p.stratum.unwrap() as usize;
            prop_assert_eq!(a.band_of(&p.id), Some(band as u8));
            for q in &programs {
                if q.stratum.unwrap() as usize > band {
                    prop_assert!(p.loc <= q.loc);
                }
            }
        }
    }

    #[test]
    fn churn_conserves_and_is_symmetric(
        a in prop::collection::vec(prop::collection::btree_set(1u32..5, 0..3), 0..10),
        b in prop::collection::vec(prop::collection::btree_set(1u32..5, 0..3), 0..10),
    ) {
        let ra = report("a", &a);
        let rb = report("b", &b);
        let ab = match_tests(&ra, &rb, VariantLabel::Baseline, None).unwrap();
        let ba = match_tests(&rb, &ra, VariantLabel::Baseline, None).unwrap();
        prop_assert!(ab.conserves());
        prop_assert_eq!(ab.matched, ba.matched);
        prop_assert_eq!(ab.new, ba.lost);
        prop_assert_eq!(ab.pairs.len(), ab.matched);
    }

    #[test]
    fn operators_keep_generated_programs_parseable(program in python_program()) {
        for op in OperatorId::ALL {
            let Some(c) = first_change("gen", &program, op, 3).unwrap() else { continue };
            prop_assert!(PySource::parse(c.new_source.as_str()).is_ok(), "{} broke:\n{}", op, c.new_source);
            match op.category() {
                Category::Sac => prop_assert_eq!(c.lines_changed, 1, "{}", op),
                Category::Spc => prop_assert!(c.lines_changed <= 7, "{} changed {}", op, c.lines_changed),
            }
            let (old_l, new_l) = (text_lines(&program), text_lines(&c.new_source));
            for (&o, &m) in &c.line_map {
                prop_assert_eq!(old_l[o as usize - 1], new_l[m as usize - 1]);
            }
        }
    }
}

fn report(prefix: &str, profiles: &[BTreeSet<u32>]) -> ExecutionReport {
    let verdicts = profiles
        .iter()
        .enumerate()
        .map(|(i, lines)| TestVerdict {
            case_name: format!("test_{prefix}{i}"),
            status: TestStatus::Pass,
            message: String::new(),
            covered_lines: lines.clone(),
            partial_coverage: false,
        })
        .collect();
    ExecutionReport::new("p", "s", verdicts, 0.0, 0.0, BTreeSet::new())
}

/// Small stdin scripts assembled from statement templates.
fn python_program() -> impl Strategy<Value = String> {
    let stmt = prop_oneof![
        Just("total = 0\nfor i in range(n):\n    total += i\nprint(total)\n".to_string()),
        Just("if n > 3 and n < 10:\n    print(\"mid\")\n".to_string()),
        Just(
            "def f(a, b):\n    # combine the pair\n    return a - b\n\n\nprint(f(n, 2))\n"
                .to_string()
        ),
        Just("k = 0\nwhile k < n:\n    k += 2\nprint(k)\n".to_string()),
        Just("xs = [1, 2, 3]\nprint(xs[0:n])\n".to_string()),
        Just("\"\"\"Block note.\"\"\"\nprint(max(n, 1))\n".to_string()),
        Just("if n == 0:\n    print(\"zero\")\nelse:\n    print(n * 3 + 1)\n".to_string()),
    ];
    prop::collection::vec(stmt, 1..5)
        .prop_map(|parts| format!("n = int(input())\n{}", parts.concat()))
}
