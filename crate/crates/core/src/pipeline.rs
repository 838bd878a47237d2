//! End-to-end analysis of one notebook: bounds, resolution, flows,
//! dependencies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, DiagnosticCode};
use crate::error::{Error, Result};
use crate::flow::{
    apply_verdicts, build_flow_graph, derive_dependency_graph, DependencyGraph, FlowGraph, ResolvedIOSet,
};
use crate::graph_json::GraphDocument;
use crate::notebook::CellSequence;
use crate::par::{map_ordered, Execution};
use crate::resolver::{resolve_all, FixedResolver, ResolutionRecord, Resolve, ResolverConfig};
use crate::syntax::{analyze_notebook, AnalyzerOptions, NotebookAnalysis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    /// Every ambiguity answered no.
    Lower,
    /// Every ambiguity answered yes.
    Upper,
    /// Ambiguities answered by the configured resolver.
    #[default]
    Resolved,
}

impl EstimateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMode::Lower => "lower",
            EstimateMode::Upper => "upper",
            EstimateMode::Resolved => "resolved",
        }
    }
}

impl fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(EstimateMode::Lower),
            "upper" => Ok(EstimateMode::Upper),
            "resolved" => Ok(EstimateMode::Resolved),
            _ => Err(Error::Config(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NotebookResult {
    pub mode: EstimateMode,
    pub analysis: NotebookAnalysis,
    pub records: Vec<ResolutionRecord>,
    pub resolved: Vec<ResolvedIOSet>,
    pub flows: FlowGraph,
    pub deps: DependencyGraph,
    pub diagnostics: Vec<Diagnostic>,
}

impl NotebookResult {
    pub fn document(&self) -> GraphDocument {
        GraphDocument::new(
            self.mode,
            &self.resolved,
            &self.flows,
            &self.deps,
            self.diagnostics.clone(),
            self.records.clone(),
        )
    }
}

/// Runs the whole pipeline. In lower and upper mode `resolver` is not
/// consulted.
pub fn run_pipeline(
    cells: &CellSequence,
    options: &AnalyzerOptions,
    mode: EstimateMode,
    resolver: &dyn Resolve,
    config: &ResolverConfig,
) -> Result<NotebookResult> {
    let analysis = analyze_notebook(cells, options);
    let ambiguities = analysis.ambiguities();
    let records = match mode {
        EstimateMode::Lower => resolve_all(&ambiguities, &analysis.sequence, &FixedResolver::new(false), config)?,
        EstimateMode::Upper => resolve_all(&ambiguities, &analysis.sequence, &FixedResolver::new(true), config)?,
        EstimateMode::Resolved => resolve_all(&ambiguities, &analysis.sequence, resolver, config)?,
    };
    finish(mode, analysis, records)
}

/// Runs the pipeline over many notebooks; results keep the input order.
pub fn run_batch(
    notebooks: &[CellSequence],
    options: &AnalyzerOptions,
    mode: EstimateMode,
    resolver: &dyn Resolve,
    config: &ResolverConfig,
    exec: Execution,
) -> Vec<Result<NotebookResult>> {
    map_ordered(exec, notebooks, |nb| run_pipeline(nb, options, mode, resolver, config))
}

/// Builds graphs from an analysis and a complete set of records.
pub fn finish(
    mode: EstimateMode,
    analysis: NotebookAnalysis,
    records: Vec<ResolutionRecord>,
) -> Result<NotebookResult> {
    let mut resolved = Vec::with_capacity(analysis.cells.len());
    for cell in &analysis.cells {
        if cell.skipped {
            resolved.push(ResolvedIOSet::skipped(cell.index));
        } else {
            resolved.push(apply_verdicts(&cell.estimates, &records)?);
        }
    }
    let (flows, flow_diags) = build_flow_graph(analysis.notebook_id(), &resolved);
    let deps = derive_dependency_graph(&flows);

    let mut diagnostics = analysis.diagnostics.clone();
    for r in records.iter().filter(|r| r.substituted) {
        diagnostics.push(Diagnostic::new(
            r.ambiguity.cell_index,
            DiagnosticCode::UnparseableSubstituted,
            format!(
                "unparseable answer for {}; used `{}`",
                r.ambiguity,
                if r.verdict { "yes" } else { "no" }
            ),
        ));
    }
    diagnostics.extend(flow_diags);
    diagnostics.sort_by_key(|d| d.cell);

    Ok(NotebookResult {
        mode,
        analysis,
        records,
        resolved,
        flows,
        deps,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::InformationFlow;

    fn count_notebook() -> CellSequence {
        CellSequence::from_sources(
            "count",
            &[
                "count = 0",
                "for i in range(3):\n    if i == 0:\n        count = 0\n    else:\n        count += 1",
            ],
        )
    }

    #[test]
    fn lower_and_upper_modes_differ_on_loop_conditional() {
        let cfg = ResolverConfig::default();
        let opts = AnalyzerOptions::default();
        let unused = FixedResolver::new(true);
        let lower = run_pipeline(&count_notebook(), &opts, EstimateMode::Lower, &unused, &cfg).unwrap();
        let upper = run_pipeline(&count_notebook(), &opts, EstimateMode::Upper, &unused, &cfg).unwrap();
        let flow = InformationFlow::data(1, 2, "count");
        assert!(!lower.flows.flows.contains(&flow));
        assert!(!lower.deps.deps.contains(&(2, 1)));
        assert!(upper.flows.flows.contains(&flow));
        assert!(upper.deps.deps.contains(&(2, 1)));
    }

    #[test]
    fn batch_order_does_not_depend_on_execution() {
        let nbs = crate::synth::generate_corpus(3, 20, Default::default());
        let cfg = ResolverConfig::default();
        let opts = AnalyzerOptions::default();
        let yes = FixedResolver::new(true);
        let seq = run_batch(&nbs, &opts, EstimateMode::Resolved, &yes, &cfg, Execution::Sequential);
        let par = run_batch(
            &nbs,
            &opts,
            EstimateMode::Resolved,
            &yes,
            &cfg,
            Execution::Parallel { threads: 4 },
        );
        let docs = |rs: Vec<Result<NotebookResult>>| -> Vec<String> {
            rs.into_iter()
                .map(|r| r.unwrap().document().to_json().unwrap())
                .collect()
        };
        assert_eq!(docs(seq), docs(par));
    }

    #[test]
    fn modes_parse() {
        assert_eq!("upper".parse::<EstimateMode>().unwrap(), EstimateMode::Upper);
        assert!("middle".parse::<EstimateMode>().is_err());
    }
}
