use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmbiguityKind {
    /// Is the name's value in this cell provided by an earlier cell?
    Input,
    /// Does this cell change the name in a way later cells observe?
    OutputCandidate,
}

impl AmbiguityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AmbiguityKind::Input => "input",
            AmbiguityKind::OutputCandidate => "output-candidate",
        }
    }
}

/// A name in a cell's upper bound but not its lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambiguity {
    pub cell_index: usize,
    pub name: String,
    pub kind: AmbiguityKind,
    /// Earlier statements that link `name` to other names, when any exist.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias_context: Option<Vec<String>>,
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell {} {} `{}`", self.cell_index, self.kind.as_str(), self.name)
    }
}
