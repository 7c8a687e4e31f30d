use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::mutation::{Category, OperatorId};

/// Which version of a program a suite or report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariantLabel {
    Baseline,
    Mutant(OperatorId),
}

impl VariantLabel {
    pub fn category(self) -> Option<Category> {
        match self {
            VariantLabel::Baseline => None,
            VariantLabel::Mutant(op) => Some(op.category()),
        }
    }

    pub fn operator(self) -> Option<OperatorId> {
        match self {
            VariantLabel::Baseline => None,
            VariantLabel::Mutant(op) => Some(op),
        }
    }

    /// Path-safe form used for directories.
    pub fn slug(self) -> String {
        match self {
            VariantLabel::Baseline => "baseline".to_string(),
            VariantLabel::Mutant(op) => op.name().to_string(),
        }
    }
}

impl fmt::Display for VariantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantLabel::Baseline => f.write_str("baseline"),
            VariantLabel::Mutant(op) => write!(f, "{}:{}", op.category(), op),
        }
    }
}

impl FromStr for VariantLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "baseline" {
            return Ok(VariantLabel::Baseline);
        }
        let (cat, op) = s
            .split_once(':')
            .ok_or_else(|| format!("bad variant label `{s}`"))?;
        let op: OperatorId = op.parse().map_err(|e| format!("{e}"))?;
        if cat != op.category().to_string() {
            return Err(format!("operator {op} is not {cat}"));
        }
        Ok(VariantLabel::Mutant(op))
    }
}

impl Serialize for VariantLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VariantLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One independently runnable test case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    /// Function name, or `Class::method` for methods of a test class.
    pub name: String,
    /// Byte range of the definition in `suite_source`.
    pub body_span: (usize, usize),
}

/// A generated test file and the cases collected from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub suite_source: String,
    pub cases: Vec<TestCase>,
    pub program_id: String,
    pub variant_label: VariantLabel,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn case(&self, name: &str) -> Option<&TestCase> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn case_names(&self) -> impl Iterator<Item = &str> {
        self.cases.iter().map(|c| c.name.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_through_strings() {
        let labels = std::iter::once(VariantLabel::Baseline)
            .chain(OperatorId::ALL.into_iter().map(VariantLabel::Mutant));
        for label in labels {
            let s = label.to_string();
            assert_eq!(s.parse::<VariantLabel>().unwrap(), label);
            let json = serde_json::to_string(&label).unwrap();
            assert_eq!(serde_json::from_str::<VariantLabel>(&json).unwrap(), label);
        }
        assert_eq!(
            VariantLabel::Mutant(OperatorId::RedundantElse).to_string(),
            "SPC:RedundantElse"
        );
        assert!("SAC:RedundantElse".parse::<VariantLabel>().is_err());
    }
}
