//! Lower and upper bounds of a cell's inter-cell I/O set, computed from the
//! ordered name events of the cell.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::alias::AliasStore;
use super::events::{Action, EventRole, Frame, NameEvent, NameKind};
use crate::ambiguity::{Ambiguity, AmbiguityKind};
use crate::diagnostics::Position;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellIOEstimate {
    /// Data names whose value may come from an earlier cell.
    pub inputs: BTreeSet<String>,
    /// Data output candidates with their definitive flag. A definitive
    /// output certainly rebinds the name on every path through the cell.
    pub outputs: BTreeMap<String, bool>,
    pub code_declarations: BTreeSet<String>,
    pub code_references: BTreeSet<String>,
    /// Names unconditionally deleted and not rebound afterwards.
    pub deletions: BTreeSet<String>,
}

impl CellIOEstimate {
    pub fn output_names(&self) -> impl Iterator<Item = &str> {
        self.outputs.keys().map(String::as_str)
    }

    pub fn is_definitive(&self, name: &str) -> bool {
        self.outputs.get(name).copied().unwrap_or(false)
    }

    /// Inputs and output names are each contained in `other`'s.
    pub fn is_subset_of(&self, other: &CellIOEstimate) -> bool {
        self.inputs.is_subset(&other.inputs)
            && self.outputs.keys().all(|k| other.outputs.contains_key(k))
            && self.code_declarations == other.code_declarations
            && self.code_references == other.code_references
    }

    fn add_output(&mut self, name: &str, definitive: bool) {
        let slot = self.outputs.entry(name.to_string()).or_insert(false);
        *slot |= definitive;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatePair {
    pub cell_index: usize,
    pub lower: CellIOEstimate,
    pub upper: CellIOEstimate,
    /// First source position of each input name.
    pub input_positions: BTreeMap<String, Position>,
    /// Position of the occurrence that made each name an output candidate.
    pub output_positions: BTreeMap<String, Position>,
    /// Earlier statements linking a name to its aliases.
    pub alias_context: BTreeMap<String, Vec<String>>,
}

enum Node {
    Event(usize),
    Branch { id: u32, arms: Vec<Vec<Node>> },
    Loop { id: u32, body: Vec<Node> },
}

fn build_tree(events: &[NameEvent]) -> Vec<Node> {
    fn insert(nodes: &mut Vec<Node>, path: &[Frame], idx: usize) {
        let Some((frame, rest)) = path.split_first() else {
            nodes.push(Node::Event(idx));
            return;
        };
        match *frame {
            Frame::Loop { id } => {
                if !matches!(nodes.last(), Some(Node::Loop { id: last, .. }) if *last == id) {
                    nodes.push(Node::Loop { id, body: Vec::new() });
                }
                if let Some(Node::Loop { body, .. }) = nodes.last_mut() {
                    insert(body, rest, idx);
                }
            }
            Frame::Branch { id, arm, arms } => {
                if !matches!(nodes.last(), Some(Node::Branch { id: last, .. }) if *last == id) {
                    let arms = (0..arms).map(|_| Vec::new()).collect();
                    nodes.push(Node::Branch { id, arms });
                }
                if let Some(Node::Branch { arms, .. }) = nodes.last_mut() {
                    insert(&mut arms[arm as usize], rest, idx);
                }
            }
        }
    }
    let mut root = Vec::new();
    for (i, e) in events.iter().enumerate() {
        insert(&mut root, &e.path, i);
    }
    root
}

/// Forward must-be-bound analysis. With `loops_run` the first iteration of
/// every loop is assumed to execute; otherwise loops may run zero times.
/// `counts` decides which events establish a binding. Uses reached while
/// the name is not bound are reported through `on_unbound_use`.
fn must_bound<'e>(
    nodes: &[Node],
    events: &'e [NameEvent],
    loops_run: bool,
    counts: &dyn Fn(&NameEvent) -> bool,
    bound: &mut BTreeSet<&'e str>,
    on_unbound_use: &mut dyn FnMut(usize),
) {
    for node in nodes {
        match node {
            Node::Event(i) => {
                let e = &events[*i];
                if e.kind != NameKind::Data {
                    continue;
                }
                match e.action {
                    Action::Use => {
                        if !bound.contains(e.name.as_str()) {
                            on_unbound_use(*i);
                        }
                    }
                    Action::Delete => {
                        bound.remove(e.name.as_str());
                    }
                    _ if counts(e) => {
                        bound.insert(e.name.as_str());
                    }
                    _ => {}
                }
            }
            Node::Branch { arms, .. } => {
                let mut joined: Option<BTreeSet<&str>> = None;
                for arm in arms {
                    let mut state = bound.clone();
                    must_bound(arm, events, loops_run, counts, &mut state, on_unbound_use);
                    joined = Some(match joined {
                        None => state,
                        Some(acc) => acc.intersection(&state).copied().collect(),
                    });
                }
                if let Some(j) = joined {
                    *bound = j;
                }
            }
            Node::Loop { body, .. } => {
                if loops_run {
                    must_bound(body, events, loops_run, counts, bound, on_unbound_use);
                } else {
                    let mut state = bound.clone();
                    must_bound(body, events, loops_run, counts, &mut state, on_unbound_use);
                }
            }
        }
    }
}

fn is_branch(f: &Frame) -> bool {
    matches!(f, Frame::Branch { .. })
}

/// A use inside a loop is not a certain input when some binding of the same
/// name in a shared loop may run before it on a later iteration, depending
/// on which branch arms execute.
fn order_dependent(events: &[NameEvent], use_idx: usize) -> bool {
    let u = &events[use_idx];
    for (d_idx, d) in events.iter().enumerate() {
        if d.name != u.name || d.kind != NameKind::Data || !d.binds() {
            continue;
        }
        for (li, frame) in u.path.iter().enumerate() {
            if !matches!(frame, Frame::Loop { .. }) {
                continue;
            }
            let Some(dj) = d.path.iter().position(|g| g == frame) else {
                continue;
            };
            let u_below = &u.path[li + 1..];
            let d_below = &d.path[dj + 1..];
            if !u_below.iter().any(is_branch) && !d_below.iter().any(is_branch) {
                continue;
            }
            let dominates = use_idx < d_idx && u_below.iter().filter(|f| is_branch(f)).all(|f| d_below.contains(f));
            if !dominates {
                return true;
            }
        }
    }
    false
}

const MUTATING_ROLES: [EventRole; 5] = [
    EventRole::CallArgument,
    EventRole::MethodBase,
    EventRole::Iterable,
    EventRole::ItemStore,
    EventRole::AugTarget,
];

struct Analysis {
    lower: CellIOEstimate,
    upper: CellIOEstimate,
    input_positions: BTreeMap<String, Position>,
    output_positions: BTreeMap<String, Position>,
}

fn analyze(events: &[NameEvent], aliases: Option<&AliasStore>) -> Analysis {
    let tree = build_tree(events);
    let mut lower = CellIOEstimate::default();
    let mut upper = CellIOEstimate::default();
    let mut input_positions = BTreeMap::new();
    let mut output_positions: BTreeMap<String, Position> = BTreeMap::new();

    // Inputs.
    let mut unbound_uses = Vec::new();
    must_bound(&tree, events, true, &|e| e.binds(), &mut BTreeSet::new(), &mut |i| {
        unbound_uses.push(i)
    });
    for i in unbound_uses {
        let e = &events[i];
        upper.inputs.insert(e.name.clone());
        input_positions.entry(e.name.clone()).or_insert(e.position);
        if !order_dependent(events, i) {
            lower.inputs.insert(e.name.clone());
        }
    }

    // Deletions: a top-level `del` with no later binding or in-place change.
    for (i, e) in events.iter().enumerate() {
        if e.kind == NameKind::Data && e.action == Action::Delete && e.path.is_empty() {
            let revived = events[i + 1..]
                .iter()
                .any(|l| l.name == e.name && matches!(l.action, Action::Define | Action::MaybeDefine));
            if !revived {
                lower.deletions.insert(e.name.clone());
            }
        }
    }
    upper.deletions = lower.deletions.clone();

    // Definitive bindings: plain definitions reached on every path with
    // loops possibly not running.
    let mut definitive = BTreeSet::new();
    must_bound(
        &tree,
        events,
        false,
        &|e| e.action == Action::Define,
        &mut definitive,
        &mut |_| {},
    );

    // Code names.
    for e in events.iter().filter(|e| e.kind == NameKind::Code) {
        match e.action {
            Action::Define => {
                lower.code_declarations.insert(e.name.clone());
            }
            Action::Use if !lower.code_declarations.contains(&e.name) => {
                lower.code_references.insert(e.name.clone());
            }
            _ => {}
        }
    }
    upper.code_declarations = lower.code_declarations.clone();
    upper.code_references = lower.code_references.clone();

    // Outputs.
    let mut mutated = Vec::new();
    for e in events.iter().filter(|e| e.kind == NameKind::Data) {
        if lower.deletions.contains(&e.name) {
            continue;
        }
        let certain = matches!(e.action, Action::Define | Action::MaybeDefine);
        let possible = e.action == Action::Use
            && matches!(
                e.role,
                EventRole::CallArgument | EventRole::MethodBase | EventRole::Iterable
            );
        if certain {
            let def = definitive.contains(e.name.as_str());
            lower.add_output(&e.name, def);
            upper.add_output(&e.name, def);
        } else if possible {
            upper.add_output(&e.name, false);
        } else {
            continue;
        }
        output_positions.entry(e.name.clone()).or_insert(e.position);
        if MUTATING_ROLES.contains(&e.role) {
            mutated.push(e);
        }
    }

    // Hidden modifications through shared references.
    if let Some(store) = aliases {
        for e in mutated {
            for other in store.aliases_of(&e.name) {
                if lower.deletions.contains(&other) {
                    continue;
                }
                output_positions.entry(other.clone()).or_insert(e.position);
                upper.add_output(&other, false);
            }
        }
    }

    Analysis {
        lower,
        upper,
        input_positions,
        output_positions,
    }
}

pub fn lower_estimate(events: &[NameEvent]) -> CellIOEstimate {
    analyze(events, None).lower
}

pub fn upper_estimate(events: &[NameEvent], aliases: &AliasStore) -> CellIOEstimate {
    analyze(events, Some(aliases)).upper
}

/// Both bounds for one cell. `aliases` must already include the cell's own
/// alias edges.
pub fn estimate_pair(cell_index: usize, events: &[NameEvent], aliases: &AliasStore) -> EstimatePair {
    let a = analyze(events, Some(aliases));
    let mut alias_context = BTreeMap::new();
    let ambiguous = a
        .upper
        .inputs
        .difference(&a.lower.inputs)
        .chain(a.upper.outputs.keys().filter(|k| !a.lower.outputs.contains_key(*k)));
    for name in ambiguous {
        let statements = aliases.context_before(name, cell_index);
        if !statements.is_empty() {
            alias_context.insert(name.clone(), statements);
        }
    }
    EstimatePair {
        cell_index,
        lower: a.lower,
        upper: a.upper,
        input_positions: a.input_positions,
        output_positions: a.output_positions,
        alias_context,
    }
}

/// Items in the upper bound but not the lower, ordered by source position.
pub fn compute_ambiguities(pair: &EstimatePair) -> Vec<Ambiguity> {
    let mut items: Vec<(Position, AmbiguityKind, &String)> = Vec::new();
    for name in pair.upper.inputs.difference(&pair.lower.inputs) {
        let pos = pair.input_positions.get(name).copied().unwrap_or_default();
        items.push((pos, AmbiguityKind::Input, name));
    }
    for name in pair
        .upper
        .outputs
        .keys()
        .filter(|k| !pair.lower.outputs.contains_key(*k))
    {
        let pos = pair.output_positions.get(name).copied().unwrap_or_default();
        items.push((pos, AmbiguityKind::OutputCandidate, name));
    }
    items.sort();
    items
        .into_iter()
        .map(|(_, kind, name)| Ambiguity {
            cell_index: pair.cell_index,
            name: name.clone(),
            kind,
            alias_context: pair.alias_context.get(name).cloned(),
        })
        .collect()
}
