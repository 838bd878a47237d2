//! Resolved per-cell I/O sets, the information flow graph between cells and
//! the transitively closed dependency graph derived from it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityKind;
use crate::diagnostics::{Diagnostic, DiagnosticCode};
use crate::error::{Error, Result};
use crate::resolver::ResolutionRecord;
use crate::syntax::{compute_ambiguities, CellIOEstimate, EstimatePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowKind {
    Data,
    Code,
}

/// `name` flows from cell `source` to the later cell `target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InformationFlow {
    pub source: usize,
    pub target: usize,
    pub name: String,
    pub kind: FlowKind,
}

impl InformationFlow {
    pub fn data(source: usize, target: usize, name: impl Into<String>) -> Self {
        Self {
            source,
            target,
            name: name.into(),
            kind: FlowKind::Data,
        }
    }

    pub fn code(source: usize, target: usize, name: impl Into<String>) -> Self {
        Self {
            kind: FlowKind::Code,
            ..Self::data(source, target, name)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedIOSet {
    pub cell_index: usize,
    pub skipped: bool,
    pub inputs: BTreeSet<String>,
    /// Output name → definitive flag.
    pub outputs: BTreeMap<String, bool>,
    pub code_declarations: BTreeSet<String>,
    pub code_references: BTreeSet<String>,
    pub deletions: BTreeSet<String>,
}

impl ResolvedIOSet {
    pub fn from_estimate(cell_index: usize, est: &CellIOEstimate) -> Self {
        Self {
            cell_index,
            skipped: false,
            inputs: est.inputs.clone(),
            outputs: est.outputs.clone(),
            code_declarations: est.code_declarations.clone(),
            code_references: est.code_references.clone(),
            deletions: est.deletions.clone(),
        }
    }

    pub fn skipped(cell_index: usize) -> Self {
        Self {
            cell_index,
            skipped: true,
            ..Self::default()
        }
    }
}

/// Lower bound plus every ambiguity answered yes. Each ambiguity of the pair
/// needs exactly one record among `records` (other cells' records are
/// ignored).
pub fn apply_verdicts(pair: &EstimatePair, records: &[ResolutionRecord]) -> Result<ResolvedIOSet> {
    let mut resolved = ResolvedIOSet::from_estimate(pair.cell_index, &pair.lower);
    for amb in compute_ambiguities(pair) {
        let mut matching = records.iter().filter(|r| {
            r.ambiguity.cell_index == amb.cell_index && r.ambiguity.name == amb.name && r.ambiguity.kind == amb.kind
        });
        let record = matching
            .next()
            .ok_or_else(|| Error::IncompleteResolution(amb.to_string()))?;
        if matching.next().is_some() {
            return Err(Error::IncompleteResolution(format!("{amb} has more than one record")));
        }
        if !record.verdict {
            continue;
        }
        match amb.kind {
            AmbiguityKind::Input => {
                resolved.inputs.insert(amb.name);
            }
            AmbiguityKind::OutputCandidate => {
                let definitive = pair.upper.is_definitive(&amb.name);
                resolved.outputs.insert(amb.name, definitive);
            }
        }
    }
    Ok(resolved)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowGraph {
    pub notebook_id: String,
    pub n_cells: usize,
    pub flows: BTreeSet<InformationFlow>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub notebook_id: String,
    pub n_cells: usize,
    /// `(t, s)`: cell `t` depends on the earlier cell `s`.
    pub deps: BTreeSet<(usize, usize)>,
    /// Pairs joined by at least one flow.
    pub direct: BTreeSet<(usize, usize)>,
}

/// Matches each input to the outputs of earlier cells. The backward scan
/// from a target takes every earlier output of the name and stops at the
/// first definitive one, so a possible or in-place change does not hide the
/// definition before it. A deletion also stops the scan.
pub fn build_flow_graph(notebook_id: &str, resolved: &[ResolvedIOSet]) -> (FlowGraph, Vec<Diagnostic>) {
    let mut flows = BTreeSet::new();
    let mut diagnostics = Vec::new();
    for (ti, cell) in resolved.iter().enumerate() {
        let t = ti + 1;
        for name in &cell.inputs {
            let mut found = false;
            for si in (0..ti).rev() {
                let src = &resolved[si];
                if src.deletions.contains(name) {
                    break;
                }
                if let Some(&definitive) = src.outputs.get(name) {
                    flows.insert(InformationFlow::data(si + 1, t, name));
                    found = true;
                    if definitive {
                        break;
                    }
                }
            }
            if !found {
                diagnostics.push(Diagnostic::new(
                    t,
                    DiagnosticCode::UnresolvedSource,
                    format!("no earlier cell provides `{name}`"),
                ));
            }
        }
        for name in &cell.code_references {
            match (0..ti).rev().find(|&si| resolved[si].code_declarations.contains(name)) {
                Some(si) => {
                    flows.insert(InformationFlow::code(si + 1, t, name));
                }
                None => diagnostics.push(Diagnostic::new(
                    t,
                    DiagnosticCode::UnresolvedSource,
                    format!("no earlier cell declares `{name}`"),
                )),
            }
        }
    }
    let graph = FlowGraph {
        notebook_id: notebook_id.to_string(),
        n_cells: resolved.len(),
        flows,
    };
    (graph, diagnostics)
}

pub fn derive_dependency_graph(graph: &FlowGraph) -> DependencyGraph {
    let direct: BTreeSet<(usize, usize)> = graph.flows.iter().map(|f| (f.target, f.source)).collect();
    DependencyGraph {
        notebook_id: graph.notebook_id.clone(),
        n_cells: graph.n_cells,
        deps: transitive_closure(&direct),
        direct,
    }
}

/// Closure of backward edges `(t, s)` with `s < t`. Visiting targets in
/// increasing order means every source's reach is final when it is used.
pub fn transitive_closure(direct: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut reach: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(t, s) in direct {
        let mut r = reach.remove(&t).unwrap_or_default();
        r.insert(s);
        if let Some(rs) = reach.get(&s) {
            r.extend(rs.iter().copied());
        }
        reach.insert(t, r);
    }
    reach
        .into_iter()
        .flat_map(|(t, ss)| ss.into_iter().map(move |s| (t, s)))
        .collect()
}
