//! On-disk mutant bundles: `<root>/<program_id>/<operator>/` holding
//! `mutant.py`, `change.diff` and `metadata.json`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use similar::TextDiff;

use super::{Category, CodeChange, Hunk, MutationSite, OperatorId};
use crate::util::{read_json, sha256_hex, write_atomic, write_json};

pub const MUTANT_FILE: &str = "mutant.py";
pub const DIFF_FILE: &str = "change.diff";
pub const METADATA_FILE: &str = "metadata.json";

/// Everything in a [`CodeChange`] except the mutant text, which lives next
/// to it in `mutant.py`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleMetadata {
    pub program_id: String,
    pub operator: OperatorId,
    pub category: Category,
    pub site: MutationSite,
    pub seed: u64,
    pub lines_changed: u32,
    pub diff_spans: Vec<Hunk>,
    pub mutated_region: BTreeSet<u32>,
    pub original_region: BTreeSet<u32>,
    pub line_map: BTreeMap<u32, u32>,
    pub original_sha256: String,
    pub mutant_sha256: String,
}

pub fn bundle_dir(root: &Path, program_id: &str, operator: OperatorId) -> PathBuf {
    root.join(program_id).join(operator.name())
}

/// Write the bundle for `change` under `root`, returning its directory.
pub fn write_bundle(root: &Path, original: &str, change: &CodeChange) -> std::io::Result<PathBuf> {
    let dir = bundle_dir(root, &change.program_id, change.operator);
    let name = format!("{}.py", change.program_id);
    let diff = TextDiff::from_lines(original, change.new_source.as_str())
        .unified_diff()
        .context_radius(3)
        .header(&format!("a/{name}"), &format!("b/{name}"))
        .to_string();
    let meta = BundleMetadata {
        program_id: change.program_id.clone(),
        operator: change.operator,
        category: change.category,
        site: change.site.clone(),
        seed: change.seed,
        lines_changed: change.lines_changed,
        diff_spans: change.diff_spans.clone(),
        mutated_region: change.mutated_region.clone(),
        original_region: change.original_region.clone(),
        line_map: change.line_map.clone(),
        original_sha256: sha256_hex(original.as_bytes()),
        mutant_sha256: sha256_hex(change.new_source.as_bytes()),
    };
    write_atomic(&dir.join(MUTANT_FILE), change.new_source.as_bytes())?;
    write_atomic(&dir.join(DIFF_FILE), diff.as_bytes())?;
    write_json(&dir.join(METADATA_FILE), &meta)?;
    Ok(dir)
}

/// Load a bundle back into a [`CodeChange`], checking the mutant text
/// against the recorded digest.
pub fn read_bundle(dir: &Path) -> std::io::Result<CodeChange> {
    let meta: BundleMetadata = read_json(&dir.join(METADATA_FILE))?;
    let new_source = std::fs::read_to_string(dir.join(MUTANT_FILE))?;
    if sha256_hex(new_source.as_bytes()) != meta.mutant_sha256 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!(
                "{}: mutant text does not match its recorded digest",
                dir.display()
            ),
        ));
    }
    Ok(CodeChange {
        program_id: meta.program_id,
        operator: meta.operator,
        category: meta.category,
        site: meta.site,
        seed: meta.seed,
        new_source,
        diff_spans: meta.diff_spans,
        lines_changed: meta.lines_changed,
        mutated_region: meta.mutated_region,
        original_region: meta.original_region,
        line_map: meta.line_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::first_change;

    #[test]
    fn bundle_round_trips() {
        let src = "n = int(input())\nprint(n + 1)\n";
        let change = first_change("p1", src, OperatorId::ChangedArithmetic, 0)
            .unwrap()
            .unwrap();
        let root = tempfile::tempdir().unwrap();
        let dir = write_bundle(root.path(), src, &change).unwrap();
        assert!(dir.ends_with("p1/ChangedArithmetic"));
        assert_eq!(read_bundle(&dir).unwrap(), change);
        let diff = std::fs::read_to_string(dir.join(DIFF_FILE)).unwrap();
        assert!(diff.contains("-print(n + 1)\n+print(n - 1)\n"), "{diff}");

        std::fs::write(dir.join(MUTANT_FILE), "tampered\n").unwrap();
        assert!(read_bundle(&dir).is_err());
    }
}
