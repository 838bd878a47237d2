//! Notebook ingest: read the nbformat v4 container, keep code cells in
//! document order and screen out lines that are not Python.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagnostics::{Diagnostic, DiagnosticCode, Position};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    CellMagic,
    EmptyAfterScreening,
    SyntaxError,
}

/// One code cell. `index` is the 1-based position among code cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeCell {
    pub index: usize,
    pub source: Vec<String>,
    pub screened_source: Vec<String>,
    /// Original 1-based line number of each entry in `screened_source`.
    pub line_map: Vec<usize>,
    /// Original 1-based line numbers removed by screening.
    pub removed_lines: Vec<usize>,
    pub skipped: bool,
    pub skip_reason: Option<SkipReason>,
}

impl CodeCell {
    /// Builds an unscreened cell; `screened_source` mirrors `source` until
    /// [`screen_cell`] runs.
    pub fn new(index: usize, source: Vec<String>) -> Self {
        let line_map = (1..=source.len()).collect();
        Self {
            index,
            screened_source: source.clone(),
            source,
            line_map,
            removed_lines: Vec::new(),
            skipped: false,
            skip_reason: None,
        }
    }

    pub fn from_text(index: usize, text: &str) -> Self {
        Self::new(index, split_lines(text))
    }

    /// Screened source joined with `\n`, as handed to the parser.
    pub fn screened_text(&self) -> String {
        self.screened_source.join("\n")
    }

    /// Maps a 1-based line of `screened_text()` back to the original line.
    pub fn original_line(&self, screened_line: usize) -> usize {
        screened_line
            .checked_sub(1)
            .and_then(|i| self.line_map.get(i).copied())
            .unwrap_or(screened_line)
    }

    pub fn mark_skipped(&mut self, reason: SkipReason) {
        self.skipped = true;
        self.skip_reason = Some(reason);
    }

    /// Diagnostics describing what screening removed.
    pub fn screening_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.skip_reason == Some(SkipReason::CellMagic) {
            let first = self.source.first().map(|s| s.trim()).unwrap_or_default();
            out.push(
                Diagnostic::new(
                    self.index,
                    DiagnosticCode::CellMagicSkipped,
                    format!("cell magic `{first}` is not analyzed; the whole cell is skipped"),
                )
                .at(Position::new(1, 0)),
            );
            return out;
        }
        for &line in &self.removed_lines {
            let text = self.source[line - 1].trim_start();
            let code = if text.starts_with('!') {
                DiagnosticCode::ShellLineRemoved
            } else {
                DiagnosticCode::MagicLineRemoved
            };
            out.push(
                Diagnostic::new(self.index, code, format!("line not analyzed: `{}`", text.trim_end()))
                    .at(Position::new(line, 0)),
            );
        }
        out
    }
}

/// Code cells of one notebook in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSequence {
    pub notebook_id: String,
    pub cells: Vec<CodeCell>,
}

impl CellSequence {
    pub fn new(notebook_id: impl Into<String>, cells: Vec<CodeCell>) -> Self {
        Self {
            notebook_id: notebook_id.into(),
            cells,
        }
    }

    /// Builds a screened sequence from raw cell texts (indices from 1).
    pub fn from_sources<S: AsRef<str>>(notebook_id: impl Into<String>, sources: &[S]) -> Self {
        let cells = sources
            .iter()
            .enumerate()
            .map(|(i, s)| screen_cell(CodeCell::from_text(i + 1, s.as_ref())))
            .collect();
        Self::new(notebook_id, cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Looks a cell up by its 1-based index.
    pub fn get(&self, index: usize) -> Option<&CodeCell> {
        index.checked_sub(1).and_then(|i| self.cells.get(i))
    }
}

/// Splits cell text into lines, keeping empty lines so that line numbers
/// match the document.
pub fn split_lines(text: &str) -> Vec<String> {
    if text.is_empty() {
        return Vec::new();
    }
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect()
}

/// Parses an nbformat v4 document and returns its screened code cells.
pub fn load_notebook(document: &[u8], notebook_id: impl Into<String>) -> Result<CellSequence> {
    let root: Value = serde_json::from_slice(document).map_err(|e| Error::Parse {
        offset: byte_offset(document, e.line(), e.column()),
        message: e.to_string(),
    })?;

    let obj = root.as_object().ok_or_else(|| schema("<root>"))?;
    let major = obj
        .get("nbformat")
        .and_then(Value::as_u64)
        .ok_or_else(|| schema("nbformat"))?;
    if major != 4 {
        return Err(Error::UnsupportedVersion(major));
    }
    let cells = obj
        .get("cells")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("cells"))?;

    let mut code_cells = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let cell_type = cell
            .get("cell_type")
            .and_then(Value::as_str)
            .ok_or_else(|| schema(&format!("cells[{i}].cell_type")))?;
        if cell_type != "code" {
            continue;
        }
        let text = source_text(cell.get("source")).ok_or_else(|| schema(&format!("cells[{i}].source")))?;
        let index = code_cells.len() + 1;
        code_cells.push(screen_cell(CodeCell::from_text(index, &text)));
    }

    if code_cells.is_empty() {
        return Err(Error::EmptyNotebook);
    }
    Ok(CellSequence::new(notebook_id, code_cells))
}

fn source_text(value: Option<&Value>) -> Option<String> {
    match value? {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => parts
            .iter()
            .map(|p| p.as_str())
            .collect::<Option<Vec<_>>>()
            .map(|v| v.concat()),
        _ => None,
    }
}

fn schema(field: &str) -> Error {
    Error::Schema {
        field: field.to_string(),
    }
}

fn byte_offset(document: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (n, chunk) in document.split(|&b| b == b'\n').enumerate() {
        if n + 1 == line {
            return (offset + column.saturating_sub(1)).min(document.len());
        }
        offset += chunk.len() + 1;
    }
    document.len()
}

fn is_foreign_line(line: &str) -> bool {
    matches!(line.trim_start().chars().next(), Some('%') | Some('!'))
}

/// Removes `%` and `!` lines. A leading `%%` cell magic skips the whole cell.
/// Always recomputed from `source`, so screening twice is a no-op.
pub fn screen_cell(mut cell: CodeCell) -> CodeCell {
    cell.screened_source.clear();
    cell.line_map.clear();
    cell.removed_lines.clear();
    cell.skipped = false;
    cell.skip_reason = None;

    let first_code = cell.source.iter().find(|l| !l.trim().is_empty());
    if first_code.is_some_and(|l| l.trim_start().starts_with("%%")) {
        cell.mark_skipped(SkipReason::CellMagic);
        return cell;
    }

    for (i, line) in cell.source.iter().enumerate() {
        if is_foreign_line(line) {
            cell.removed_lines.push(i + 1);
        } else {
            cell.screened_source.push(line.clone());
            cell.line_map.push(i + 1);
        }
    }
    if cell.screened_source.iter().all(|l| l.trim().is_empty()) {
        cell.mark_skipped(SkipReason::EmptyAfterScreening);
    }
    cell
}
