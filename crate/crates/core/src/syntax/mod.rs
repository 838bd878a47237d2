//! Syntactic phase: parse each cell, walk the tree for name events and
//! derive the lower and upper bounds of the cell's inter-cell I/O set.

mod alias;
mod analyzer;
mod estimate;
mod events;
mod symbols;
pub(crate) mod walk;

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::text_size::TextRange;
use rustpython_parser::Parse;

pub use alias::{update_alias_store, AliasEdge, AliasKind, AliasStore};
pub use analyzer::{analyze_notebook, AnalyzerOptions, CellAnalysis, NotebookAnalysis};
pub use estimate::{compute_ambiguities, estimate_pair, lower_estimate, upper_estimate, CellIOEstimate, EstimatePair};
pub use events::{collect_name_events, Action, Conditionality, EventRole, Frame, NameEvent, NameKind};
pub use symbols::{is_builtin, NameClass, NotebookSymbols};

use crate::diagnostics::{Diagnostic, DiagnosticCode, Position};
use crate::notebook::CodeCell;

/// Parsed cell body plus what is needed to map byte offsets back to
/// positions in the original cell.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub cell_index: usize,
    pub suite: Vec<ast::Stmt>,
    text: String,
    line_starts: Vec<usize>,
    line_map: Vec<usize>,
}

impl SyntaxTree {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn position(&self, offset: usize) -> Position {
        let line_idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line_idx];
        let end = offset.min(self.text.len());
        let column = self.text.get(start..end).map_or(0, |s| s.chars().count());
        let line = self.line_map.get(line_idx).copied().unwrap_or(line_idx + 1);
        Position::new(line, column)
    }

    pub fn position_of(&self, node: &impl Ranged) -> Position {
        self.position(node.range().start().to_usize())
    }

    /// Verbatim source of a node.
    pub fn slice(&self, range: TextRange) -> &str {
        &self.text[range.start().to_usize()..range.end().to_usize()]
    }
}

/// Parses the screened source of a cell. On failure the returned diagnostic
/// carries the error position; the caller decides to skip the cell.
pub fn parse_cell(cell: &CodeCell) -> Result<SyntaxTree, Diagnostic> {
    let text = cell.screened_text();
    let mut line_starts = vec![0];
    line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
    let mut tree = SyntaxTree {
        cell_index: cell.index,
        suite: Vec::new(),
        text,
        line_starts,
        line_map: cell.line_map.clone(),
    };
    match ast::Suite::parse(&tree.text, "<cell>") {
        Ok(suite) => {
            tree.suite = suite;
            Ok(tree)
        }
        Err(err) => {
            let position = tree.position(err.offset.to_usize());
            Err(Diagnostic::new(cell.index, DiagnosticCode::SyntaxError, err.error.to_string()).at(position))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notebook::screen_cell;

    fn cell(text: &str) -> CodeCell {
        screen_cell(CodeCell::from_text(1, text))
    }

    #[test]
    fn simple_assignment_parses() {
        let tree = parse_cell(&cell("x = 1")).unwrap();
        assert_eq!(tree.suite.len(), 1);
        assert!(matches!(tree.suite[0], ast::Stmt::Assign(_)));
    }

    #[test]
    fn syntax_error_yields_diagnostic() {
        let diag = parse_cell(&cell("def f(:")).unwrap_err();
        assert_eq!(diag.code, DiagnosticCode::SyntaxError);
        assert_eq!(diag.position.unwrap().line, 1);
    }

    #[test]
    fn inplace_method_call_is_one_expression_statement() {
        let tree = parse_cell(&cell("train.drop(['PassengerId'], axis=1, inplace=True)")).unwrap();
        assert_eq!(tree.suite.len(), 1);
        let ast::Stmt::Expr(stmt) = &tree.suite[0] else {
            panic!("expected expression statement");
        };
        assert!(matches!(*stmt.value, ast::Expr::Call(_)));
    }

    #[test]
    fn positions_map_to_original_lines() {
        let tree = parse_cell(&cell("!pip install x\nimport x\ny = x")).unwrap();
        let pos = tree.position_of(&tree.suite[1]);
        assert_eq!(pos, Position::new(3, 0));
    }
}
