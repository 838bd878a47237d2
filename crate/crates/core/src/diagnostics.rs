use std::fmt;

use serde::{Deserialize, Serialize};

/// Line/column inside a cell. Lines are 1-based and refer to the original
/// (unscreened) cell source; columns are 0-based character offsets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub const fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticCode {
    /// A `%` line magic was removed before parsing.
    MagicLineRemoved,
    /// A `!` shell line was removed before parsing.
    ShellLineRemoved,
    /// The cell starts with a `%%` cell magic and was skipped.
    CellMagicSkipped,
    /// The screened cell did not parse and was skipped.
    SyntaxError,
    /// `global` / `nonlocal` inside a function: flows through it are not tracked.
    GlobalInFunction,
    /// A function body reads a notebook-level name that is not a parameter.
    FunctionFreeVariable,
    /// A name is used both as a function/class name and as a data name.
    NameReuse,
    /// A cell input has no earlier cell providing it.
    UnresolvedSource,
    /// An unparseable resolver answer was replaced by the configured default.
    UnparseableSubstituted,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::MagicLineRemoved => "magic-line-removed",
            DiagnosticCode::ShellLineRemoved => "shell-line-removed",
            DiagnosticCode::CellMagicSkipped => "cell-magic-skipped",
            DiagnosticCode::SyntaxError => "syntax-error",
            DiagnosticCode::GlobalInFunction => "global-in-function",
            DiagnosticCode::FunctionFreeVariable => "function-free-variable",
            DiagnosticCode::NameReuse => "name-reuse",
            DiagnosticCode::UnresolvedSource => "unresolved-source",
            DiagnosticCode::UnparseableSubstituted => "unparseable-substituted",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub cell: usize,
    pub position: Option<Position>,
    pub code: DiagnosticCode,
    pub message: String,
}

impl Diagnostic {
    pub fn new(cell: usize, code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self {
            cell,
            position: None,
            code,
            message: message.into(),
        }
    }

    pub fn at(mut self, position: Position) -> Self {
        self.position = Some(position);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some(p) => write!(f, "cell {} [{}] {}: {}", self.cell, p, self.code, self.message),
            None => write!(f, "cell {} {}: {}", self.cell, self.code, self.message),
        }
    }
}
