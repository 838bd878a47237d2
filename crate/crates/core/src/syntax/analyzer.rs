use crate::ambiguity::Ambiguity;
use crate::diagnostics::Diagnostic;
use crate::notebook::{CellSequence, SkipReason};

use super::alias::{update_alias_store, AliasStore};
use super::estimate::{compute_ambiguities, estimate_pair, EstimatePair};
use super::events::{collect_name_events, NameEvent};
use super::symbols::NotebookSymbols;
use super::{parse_cell, SyntaxTree};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalyzerOptions {
    /// Treat imported names as data variables.
    pub track_imports: bool,
}

#[derive(Debug, Clone)]
pub struct CellAnalysis {
    pub index: usize,
    pub skipped: bool,
    pub events: Vec<NameEvent>,
    pub estimates: EstimatePair,
    pub ambiguities: Vec<Ambiguity>,
}

#[derive(Debug, Clone)]
pub struct NotebookAnalysis {
    /// The input cells, with cells that failed to parse marked skipped.
    pub sequence: CellSequence,
    pub cells: Vec<CellAnalysis>,
    pub diagnostics: Vec<Diagnostic>,
    /// Alias edges after the last cell.
    pub aliases: AliasStore,
    pub symbols: NotebookSymbols,
}

impl NotebookAnalysis {
    pub fn notebook_id(&self) -> &str {
        &self.sequence.notebook_id
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Every ambiguity in cell order, then source order.
    pub fn ambiguities(&self) -> Vec<Ambiguity> {
        self.cells.iter().flat_map(|c| c.ambiguities.iter().cloned()).collect()
    }
}

pub fn analyze_notebook(sequence: &CellSequence, options: &AnalyzerOptions) -> NotebookAnalysis {
    let mut sequence = sequence.clone();
    let mut diagnostics = Vec::new();
    let mut trees: Vec<Option<SyntaxTree>> = Vec::with_capacity(sequence.len());
    for cell in &mut sequence.cells {
        diagnostics.extend(cell.screening_diagnostics());
        if cell.skipped {
            trees.push(None);
            continue;
        }
        match parse_cell(cell) {
            Ok(tree) => trees.push(Some(tree)),
            Err(diag) => {
                log::warn!("{}: {diag}", sequence.notebook_id);
                diagnostics.push(diag);
                cell.mark_skipped(SkipReason::SyntaxError);
                trees.push(None);
            }
        }
    }

    let symbols = NotebookSymbols::collect(trees.iter().flatten(), options.track_imports);
    let mut aliases = AliasStore::new();
    let mut cells = Vec::with_capacity(trees.len());
    for (i, tree) in trees.iter().enumerate() {
        let index = i + 1;
        let Some(tree) = tree else {
            cells.push(CellAnalysis {
                index,
                skipped: true,
                events: Vec::new(),
                estimates: EstimatePair {
                    cell_index: index,
                    ..Default::default()
                },
                ambiguities: Vec::new(),
            });
            continue;
        };
        let events = collect_name_events(tree, &symbols, &mut diagnostics);
        aliases = update_alias_store(tree, &aliases, &symbols);
        let estimates = estimate_pair(index, &events, &aliases);
        let ambiguities = compute_ambiguities(&estimates);
        cells.push(CellAnalysis {
            index,
            skipped: false,
            events,
            estimates,
            ambiguities,
        });
    }

    NotebookAnalysis {
        sequence,
        cells,
        diagnostics,
        aliases,
        symbols,
    }
}
