//! Graphviz rendering of graph documents.

use std::fmt::Write as _;

use crate::flow::FlowKind;
use crate::graph_json::GraphDocument;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn header(doc: &GraphDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&doc.notebook_id));
    let _ = writeln!(out, "  node [shape=box];");
    for i in 1..=doc.n_cells {
        let _ = writeln!(out, "  c{i} [label=\"cell {i}\"];");
    }
    out
}

/// One edge per flow from source to target cell, labeled with the name;
/// code flows are dashed.
pub fn flows_to_dot(doc: &GraphDocument) -> String {
    let mut out = header(doc);
    let mut flows = doc.flows.clone();
    flows.sort_by(|a, b| (a.source, a.target, &a.name, a.kind).cmp(&(b.source, b.target, &b.name, b.kind)));
    for f in &flows {
        let style = match f.kind {
            FlowKind::Data => "",
            FlowKind::Code => ", style=dashed",
        };
        let _ = writeln!(
            out,
            "  c{} -> c{} [label={}{style}];",
            f.source,
            f.target,
            quote(&f.name)
        );
    }
    out.push_str("}\n");
    out
}

/// Dependency edges from the dependent cell to the cell it depends on;
/// edges implied only by transitivity are dotted.
pub fn deps_to_dot(doc: &GraphDocument) -> String {
    let graph = doc.dependency_graph();
    let mut out = header(doc);
    for &(t, s) in &graph.deps {
        if graph.direct.contains(&(t, s)) {
            let _ = writeln!(out, "  c{t} -> c{s};");
        } else {
            let _ = writeln!(out, "  c{t} -> c{s} [style=dotted];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{derive_dependency_graph, FlowGraph, InformationFlow, ResolvedIOSet};
    use crate::pipeline::EstimateMode;

    fn doc(n: usize, flows: Vec<InformationFlow>) -> GraphDocument {
        let g = FlowGraph {
            notebook_id: "nb".into(),
            n_cells: n,
            flows: flows.into_iter().collect(),
        };
        let d = derive_dependency_graph(&g);
        let cells: Vec<_> = (1..=n).map(ResolvedIOSet::skipped).collect();
        GraphDocument::new(EstimateMode::Resolved, &cells, &g, &d, vec![], vec![])
    }

    #[test]
    fn flow_edges_are_labeled() {
        let d = doc(
            6,
            vec![
                InformationFlow::data(1, 5, "survey"),
                InformationFlow::data(5, 6, "survey"),
            ],
        );
        let dot = flows_to_dot(&d);
        assert!(dot.contains("c1 -> c5 [label=\"survey\"];"));
        assert!(dot.contains("c5 -> c6 [label=\"survey\"];"));
        assert!(dot.contains("c6 [label=\"cell 6\"];"));
    }

    #[test]
    fn code_flows_are_dashed() {
        let dot = flows_to_dot(&doc(3, vec![InformationFlow::code(2, 3, "add_one")]));
        assert!(dot.contains("c2 -> c3 [label=\"add_one\", style=dashed];"));
    }

    #[test]
    fn empty_graph_has_nodes_only() {
        let dot = flows_to_dot(&doc(2, vec![]));
        assert!(!dot.contains("->"));
        assert!(dot.contains("c1 [label=\"cell 1\"]"));
    }

    #[test]
    fn closure_only_edges_are_dotted() {
        let dot = deps_to_dot(&doc(
            3,
            vec![InformationFlow::data(1, 2, "a"), InformationFlow::data(2, 3, "b")],
        ));
        assert!(dot.contains("c2 -> c1;"));
        assert!(dot.contains("c3 -> c2;"));
        assert!(dot.contains("c3 -> c1 [style=dotted];"));
    }
}
