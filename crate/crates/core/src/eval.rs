//! Scoring predicted graphs against hand annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{derive_dependency_graph, DependencyGraph, FlowGraph, InformationFlow};
use crate::resolver::{ResolutionRecord, TruthOracle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub notebook_id: String,
    pub n_cells: usize,
    pub flows: Vec<InformationFlow>,
}

impl GroundTruth {
    pub fn from_json(text: &str) -> Result<Self> {
        let truth: GroundTruth = serde_json::from_str(text)?;
        truth.validate()?;
        Ok(truth)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Flows point strictly forward, stay within the notebook and are not
    /// duplicated.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for f in &self.flows {
            if !(1 <= f.source && f.source < f.target && f.target <= self.n_cells) {
                return Err(Error::AnnotationMismatch(format!(
                    "{}: flow {} -> {} `{}` is outside 1..={} or not forward",
                    self.notebook_id, f.source, f.target, f.name, self.n_cells
                )));
            }
            if !seen.insert((f.source, f.target, &f.name)) {
                return Err(Error::AnnotationMismatch(format!(
                    "{}: duplicate flow {} -> {} `{}`",
                    self.notebook_id, f.source, f.target, f.name
                )));
            }
        }
        Ok(())
    }

    pub fn flow_graph(&self) -> FlowGraph {
        FlowGraph {
            notebook_id: self.notebook_id.clone(),
            n_cells: self.n_cells,
            flows: self.flows.iter().cloned().collect(),
        }
    }

    pub fn dependency_graph(&self) -> DependencyGraph {
        derive_dependency_graph(&self.flow_graph())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Jaccard index tp / (tp + fp + fn).
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl SetScores {
    pub fn zero() -> Self {
        Self {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            accuracy: 0.0,
            tp: 0,
            fp: 0,
            fn_: 0,
        }
    }

    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        if tp + fp + fn_ == 0 {
            return Self {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
                accuracy: 1.0,
                tp,
                fp,
                fn_,
            };
        }
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
            accuracy: ratio(tp, tp + fp + fn_),
            tp,
            fp,
            fn_,
        }
    }
}

pub fn score_sets<T: Ord>(predicted: &BTreeSet<T>, truth: &BTreeSet<T>) -> SetScores {
    let tp = predicted.intersection(truth).count();
    SetScores::from_counts(tp, predicted.len() - tp, truth.len() - tp)
}

/// A graph over the cells of one notebook.
pub trait CellGraph {
    type Edge: Ord;
    fn n_cells(&self) -> usize;
    fn edges(&self) -> &BTreeSet<Self::Edge>;
}

impl CellGraph for FlowGraph {
    type Edge = InformationFlow;
    fn n_cells(&self) -> usize {
        self.n_cells
    }
    fn edges(&self) -> &BTreeSet<InformationFlow> {
        &self.flows
    }
}

impl CellGraph for DependencyGraph {
    type Edge = (usize, usize);
    fn n_cells(&self) -> usize {
        self.n_cells
    }
    fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.deps
    }
}

pub fn exact_match<G: CellGraph>(predicted: &G, truth: &G) -> bool {
    predicted.n_cells() == truth.n_cells() && predicted.edges() == truth.edges()
}

/// Correct verdicts out of all records; `value` is `None` when there were
/// no records at all.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResolutionAccuracy {
    pub correct: usize,
    pub total: usize,
    pub value: Option<f64>,
}

impl ResolutionAccuracy {
    pub fn new(correct: usize, total: usize) -> Self {
        Self {
            correct,
            total,
            value: (total > 0).then(|| correct as f64 / total as f64),
        }
    }
}

pub fn resolution_accuracy(records: &[ResolutionRecord], truth: &GroundTruth) -> Result<ResolutionAccuracy> {
    let oracle = TruthOracle::new(&truth.flows);
    let mut correct = 0;
    for r in records {
        let cell = r.ambiguity.cell_index;
        if cell == 0 || cell > truth.n_cells {
            return Err(Error::AnnotationMismatch(format!(
                "{}: record for cell {cell} but the annotation has {} cells",
                truth.notebook_id, truth.n_cells
            )));
        }
        if oracle.verdict(&r.ambiguity) == r.verdict {
            correct += 1;
        }
    }
    Ok(ResolutionAccuracy::new(correct, records.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotebookScores {
    pub flow: SetScores,
    pub dep: SetScores,
    pub em_flow: bool,
    pub em_dep: bool,
    pub resolution: ResolutionAccuracy,
}

/// Scores one predicted flow graph. A prediction with a different number of
/// cells than the annotation scores zero everywhere.
pub fn score_notebook(
    predicted: &FlowGraph,
    truth: &GroundTruth,
    records: &[ResolutionRecord],
) -> Result<NotebookScores> {
    let truth_flows = truth.flow_graph();
    let resolution = if predicted.n_cells == truth.n_cells {
        resolution_accuracy(records, truth)?
    } else {
        ResolutionAccuracy::new(0, records.len())
    };
    if predicted.n_cells != truth.n_cells {
        return Ok(NotebookScores {
            flow: SetScores::zero(),
            dep: SetScores::zero(),
            em_flow: false,
            em_dep: false,
            resolution,
        });
    }
    let pred_deps = derive_dependency_graph(predicted);
    let truth_deps = derive_dependency_graph(&truth_flows);
    Ok(NotebookScores {
        flow: score_sets(&predicted.flows, &truth_flows.flows),
        dep: score_sets(&pred_deps.deps, &truth_deps.deps),
        em_flow: exact_match(predicted, &truth_flows),
        em_dep: exact_match(&pred_deps, &truth_deps),
        resolution,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateScores {
    pub flow: MeanScores,
    pub dep: MeanScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_notebook: BTreeMap<String, NotebookScores>,
    /// Unweighted means over notebooks.
    pub aggregate: AggregateScores,
    pub em_rate_flow: f64,
    pub em_rate_dep: f64,
    /// Pooled over every record of every notebook.
    pub resolution_accuracy: ResolutionAccuracy,
    /// Predictions that could not be scored, with the reason.
    #[serde(default)]
    pub missing: BTreeMap<String, String>,
    pub incomplete: bool,
}

fn mean_of(scores: &[&SetScores]) -> MeanScores {
    let n = scores.len() as f64;
    MeanScores {
        precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
        accuracy: scores.iter().map(|s| s.accuracy).sum::<f64>() / n,
    }
}

pub fn aggregate(per_notebook: BTreeMap<String, NotebookScores>) -> Result<MetricsReport> {
    if per_notebook.is_empty() {
        return Err(Error::EmptyReport);
    }
    let all: Vec<&NotebookScores> = per_notebook.values().collect();
    let n = all.len() as f64;
    let flows: Vec<&SetScores> = all.iter().map(|s| &s.flow).collect();
    let deps: Vec<&SetScores> = all.iter().map(|s| &s.dep).collect();
    let correct = all.iter().map(|s| s.resolution.correct).sum();
    let total = all.iter().map(|s| s.resolution.total).sum();
    Ok(MetricsReport {
        aggregate: AggregateScores {
            flow: mean_of(&flows),
            dep: mean_of(&deps),
        },
        em_rate_flow: all.iter().filter(|s| s.em_flow).count() as f64 / n,
        em_rate_dep: all.iter().filter(|s| s.em_dep).count() as f64 / n,
        resolution_accuracy: ResolutionAccuracy::new(correct, total),
        per_notebook,
        missing: BTreeMap::new(),
        incomplete: false,
    })
}

impl MetricsReport {
    /// Plain-text table: one row per notebook plus a mean row.
    pub fn table(&self) -> String {
        let width = self.per_notebook.keys().map(|k| k.len()).max().unwrap_or(8).max(8);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>9}",
            "notebook",
            "flow-P",
            "flow-R",
            "flow-F1",
            "flow-A",
            "EM",
            "dep-P",
            "dep-R",
            "dep-F1",
            "dep-A",
            "EM",
            "resolved"
        );
        let pct = |x: f64| format!("{:.2}", x * 100.0);
        let em = |b: bool| if b { "yes" } else { "no" };
        for (id, s) in &self.per_notebook {
            let res = match s.resolution.total {
                0 => "n/a".to_string(),
                t => format!("{}/{}", s.resolution.correct, t),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>9}",
                id,
                pct(s.flow.precision),
                pct(s.flow.recall),
                pct(s.flow.f1),
                pct(s.flow.accuracy),
                em(s.em_flow),
                pct(s.dep.precision),
                pct(s.dep.recall),
                pct(s.dep.f1),
                pct(s.dep.accuracy),
                em(s.em_dep),
                res
            );
        }
        let a = &self.aggregate;
        let res = match self.resolution_accuracy.value {
            Some(v) => format!("{}%", pct(v)),
            None => "n/a".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>7} {:>7} {:>7} {:>7} {:>3}  {:>9}",
            "mean",
            pct(a.flow.precision),
            pct(a.flow.recall),
            pct(a.flow.f1),
            pct(a.flow.accuracy),
            format!("{:.0}%", self.em_rate_flow * 100.0),
            pct(a.dep.precision),
            pct(a.dep.recall),
            pct(a.dep.f1),
            pct(a.dep.accuracy),
            format!("{:.0}%", self.em_rate_dep * 100.0),
            res
        );
        for (id, why) in &self.missing {
            let _ = writeln!(out, "not scored: {id}: {why}");
        }
        out
    }
}
