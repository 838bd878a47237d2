//! The graph document written per analyzed notebook: resolved cell sets,
//! flows, dependencies, diagnostics and resolution records in one file.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::flow::{derive_dependency_graph, DependencyGraph, FlowGraph, InformationFlow, ResolvedIOSet};
use crate::pipeline::EstimateMode;
use crate::resolver::ResolutionRecord;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub name: String,
    pub definitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub index: usize,
    pub skipped: bool,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputRecord>,
    pub code_declarations: Vec<String>,
    pub code_references: Vec<String>,
}

impl From<&ResolvedIOSet> for CellRecord {
    fn from(r: &ResolvedIOSet) -> Self {
        Self {
            index: r.cell_index,
            skipped: r.skipped,
            inputs: r.inputs.iter().cloned().collect(),
            outputs: r
                .outputs
                .iter()
                .map(|(name, &definitive)| OutputRecord {
                    name: name.clone(),
                    definitive,
                })
                .collect(),
            code_declarations: r.code_declarations.iter().cloned().collect(),
            code_references: r.code_references.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub schema_version: u32,
    pub notebook_id: String,
    pub n_cells: usize,
    pub mode: EstimateMode,
    pub cells: Vec<CellRecord>,
    pub flows: Vec<InformationFlow>,
    /// `[t, s]`: cell `t` depends on cell `s`, transitively closed.
    pub deps: Vec<[usize; 2]>,
    pub diagnostics: Vec<Diagnostic>,
    pub resolutions: Vec<ResolutionRecord>,
}

impl GraphDocument {
    pub fn new(
        mode: EstimateMode,
        resolved: &[ResolvedIOSet],
        flows: &FlowGraph,
        deps: &DependencyGraph,
        diagnostics: Vec<Diagnostic>,
        resolutions: Vec<ResolutionRecord>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            notebook_id: flows.notebook_id.clone(),
            n_cells: flows.n_cells,
            mode,
            cells: resolved.iter().map(CellRecord::from).collect(),
            flows: flows.flows.iter().cloned().collect(),
            deps: deps.deps.iter().map(|&(t, s)| [t, s]).collect(),
            diagnostics,
            resolutions,
        }
    }

    pub fn flow_graph(&self) -> FlowGraph {
        FlowGraph {
            notebook_id: self.notebook_id.clone(),
            n_cells: self.n_cells,
            flows: self.flows.iter().cloned().collect(),
        }
    }

    /// Dependencies as stored, with direct edges recomputed from the flows.
    pub fn dependency_graph(&self) -> DependencyGraph {
        let derived = derive_dependency_graph(&self.flow_graph());
        DependencyGraph {
            deps: self.deps.iter().map(|&[t, s]| (t, s)).collect::<BTreeSet<_>>(),
            ..derived
        }
    }

    /// Pretty JSON with a trailing newline; identical documents give
    /// identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Schema {
            field: format!("graph document ({e})"),
        })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                field: format!(
                    "schema_version (found {}, expected {SCHEMA_VERSION})",
                    doc.schema_version
                ),
            });
        }
        Ok(doc)
    }
}
