//! Information-flow and cell-dependency analysis for Jupyter notebooks.
//!
//! The pipeline reads a notebook, bounds each cell's inputs and outputs
//! from the syntax alone, settles the names that fall between the bounds
//! with a pluggable resolver, and builds the flow and dependency graphs.

pub mod ambiguity;
pub mod diagnostics;
pub mod dot;
pub mod error;
pub mod eval;
pub mod flow;
pub mod graph_json;
pub mod notebook;
pub mod par;
pub mod pipeline;
pub mod resolver;
pub mod syntax;
pub mod synth;

pub use ambiguity::{Ambiguity, AmbiguityKind};
pub use diagnostics::{Diagnostic, DiagnosticCode, Position};
pub use error::{Error, Result};
pub use flow::{DependencyGraph, FlowGraph, FlowKind, InformationFlow, ResolvedIOSet};
pub use graph_json::GraphDocument;
pub use notebook::{load_notebook, screen_cell, CellSequence, CodeCell, SkipReason};
pub use par::Execution;
pub use pipeline::{run_batch, run_pipeline, EstimateMode, NotebookResult};
