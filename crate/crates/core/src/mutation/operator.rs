use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Whether a change is meant to alter program behaviour or preserve it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    Sac,
    Spc,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Sac => "SAC",
            Category::Spc => "SPC",
        })
    }
}

/// The fourteen code-change operators. The first five alter semantics; the
/// remaining nine preserve them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    BoundaryShift,
    ChangedBooleanLogic,
    ChangedArithmetic,
    ArgumentSwap,
    VariableRoleRebinding,
    VoidLoopInjection,
    VoidCondition,
    RedundantElse,
    EquivalentComparison,
    UnusedParameter,
    MisleadingVariables,
    MisleadingComments,
    MisleadingMandarin,
    RemoveComments,
}

impl OperatorId {
    pub const ALL: [OperatorId; 14] = [
        OperatorId::BoundaryShift,
        OperatorId::ChangedBooleanLogic,
        OperatorId::ChangedArithmetic,
        OperatorId::ArgumentSwap,
        OperatorId::VariableRoleRebinding,
        OperatorId::VoidLoopInjection,
        OperatorId::VoidCondition,
        OperatorId::RedundantElse,
        OperatorId::EquivalentComparison,
        OperatorId::UnusedParameter,
        OperatorId::MisleadingVariables,
        OperatorId::MisleadingComments,
        OperatorId::MisleadingMandarin,
        OperatorId::RemoveComments,
    ];

    pub fn category(self) -> Category {
        if (self as usize) < 5 {
            Category::Sac
        } else {
            Category::Spc
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::BoundaryShift => "BoundaryShift",
            OperatorId::ChangedBooleanLogic => "ChangedBooleanLogic",
            OperatorId::ChangedArithmetic => "ChangedArithmetic",
            OperatorId::ArgumentSwap => "ArgumentSwap",
            OperatorId::VariableRoleRebinding => "VariableRoleRebinding",
            OperatorId::VoidLoopInjection => "VoidLoopInjection",
            OperatorId::VoidCondition => "VoidCondition",
            OperatorId::RedundantElse => "RedundantElse",
            OperatorId::EquivalentComparison => "EquivalentComparison",
            OperatorId::UnusedParameter => "UnusedParameter",
            OperatorId::MisleadingVariables => "MisleadingVariables",
            OperatorId::MisleadingComments => "MisleadingComments",
            OperatorId::MisleadingMandarin => "MisleadingMandarin",
            OperatorId::RemoveComments => "RemoveComments",
        }
    }

    pub fn sacs() -> impl Iterator<Item = OperatorId> {
        Self::ALL
            .into_iter()
            .filter(|op| op.category() == Category::Sac)
    }

    pub fn spcs() -> impl Iterator<Item = OperatorId> {
        Self::ALL
            .into_iter()
            .filter(|op| op.category() == Category::Spc)
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown operator `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for OperatorId {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_sacs_then_nine_spcs() {
        assert_eq!(OperatorId::sacs().count(), 5);
        assert_eq!(OperatorId::spcs().count(), 9);
        assert!(OperatorId::ALL[..5]
            .iter()
            .all(|o| o.category() == Category::Sac));
        assert!(OperatorId::ALL[5..]
            .iter()
            .all(|o| o.category() == Category::Spc));
    }

    #[test]
    fn names_round_trip() {
        for op in OperatorId::ALL {
            assert_eq!(op.name().parse::<OperatorId>().unwrap(), op);
        }
        assert!("Nope".parse::<OperatorId>().is_err());
    }
}
