use std::collections::{BTreeMap, BTreeSet};

use crabs_core::eval::{score_sets, SetScores};
use crabs_core::flow::transitive_closure;
use crabs_core::resolver::{Answer, FixedResolver, Query, Resolve, ResolverConfig};
use crabs_core::syntax::AnalyzerOptions;
use crabs_core::synth::{generate_corpus, SynthConfig};
use crabs_core::{run_pipeline, CellSequence, EstimateMode, InformationFlow, Result};
use proptest::prelude::*;

fn reachable(direct: &BTreeSet<(usize, usize)>, n: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for start in 1..=n {
        let mut stack = vec![start];
        let mut seen = BTreeSet::new();
        while let Some(v) = stack.pop() {
            for &(t, s) in direct {
                if t == v && seen.insert(s) {
                    stack.push(s);
                }
            }
        }
        out.extend(seen.into_iter().map(|s| (start, s)));
    }
    out
}

fn backward_edges() -> impl Strategy<Value = (usize, BTreeSet<(usize, usize)>)> {
    (2usize..12).prop_flat_map(|n| {
        let edge = (2..=n).prop_flat_map(|t| (Just(t), 1..t));
        (Just(n), proptest::collection::btree_set(edge, 0..30))
    })
}

fn small_set() -> impl Strategy<Value = BTreeSet<u8>> {
    proptest::collection::btree_set(0u8..20, 0..15)
}

proptest! {
    #[test]
    fn closure_matches_search((n, direct) in backward_edges()) {
        prop_assert_eq!(transitive_closure(&direct), reachable(&direct, n));
    }

    #[test]
    fn scores_match_counting(p in small_set(), t in small_set()) {
        let s = score_sets(&p, &t);
        let tp = p.iter().filter(|x| t.contains(x)).count();
        let fp = p.iter().filter(|x| !t.contains(x)).count();
        let fn_ = t.iter().filter(|x| !p.contains(x)).count();
        prop_assert_eq!((s.tp, s.fp, s.fn_), (tp, fp, fn_));
        if tp + fp + fn_ > 0 {
            prop_assert!((s.accuracy - tp as f64 / (tp + fp + fn_) as f64).abs() < 1e-12);
        }
        if tp + fp > 0 {
            prop_assert!((s.precision - tp as f64 / (tp + fp) as f64).abs() < 1e-12);
        }
        if tp + fn_ > 0 {
            prop_assert!((s.recall - tp as f64 / (tp + fn_) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn accuracy_follows_from_f1(p in small_set(), t in small_set()) {
        let s = score_sets(&p, &t);
        prop_assert!((s.accuracy - s.f1 / (2.0 - s.f1)).abs() < 1e-9);
    }

    #[test]
    fn swapping_prediction_and_truth(p in small_set(), t in small_set()) {
        let a = score_sets(&p, &t);
        let b = score_sets(&t, &p);
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        prop_assert!((a.f1 - b.f1).abs() < 1e-12);
        prop_assert_eq!(a.accuracy, b.accuracy);
    }

    #[test]
    fn scores_stay_in_unit_interval(p in small_set(), t in small_set()) {
        let s: SetScores = score_sets(&p, &t);
        for v in [s.precision, s.recall, s.f1, s.accuracy] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}

/// Answers by hashing the prompt with a seed.
struct CoinResolver(u64);

impl Resolve for CoinResolver {
    fn id(&self) -> &str {
        "coin"
    }
    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        let h = query
            .prompt_hash
            .bytes()
            .fold(self.0, |acc, b| acc.wrapping_mul(31).wrapping_add(b as u64));
        Ok(Answer::of(h % 2 == 0, "coin"))
    }
}

fn run(nb: &CellSequence, mode: EstimateMode, resolver: &dyn Resolve) -> crabs_core::NotebookResult {
    run_pipeline(
        nb,
        &AnalyzerOptions::default(),
        mode,
        resolver,
        &ResolverConfig::default(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounds_and_resolutions_are_nested(seed in any::<u64>(), coin in any::<u64>()) {
        let nb = &generate_corpus(seed, 1, SynthConfig::default())[0];
        let unused = FixedResolver::new(false);
        let lower = run(nb, EstimateMode::Lower, &unused);
        let upper = run(nb, EstimateMode::Upper, &unused);
        let yes = run(nb, EstimateMode::Resolved, &FixedResolver::new(true));
        let coin = run(nb, EstimateMode::Resolved, &CoinResolver(coin));

        for cell in &lower.analysis.cells {
            prop_assert!(cell.estimates.lower.is_subset_of(&cell.estimates.upper));
        }
        prop_assert_eq!(&yes.resolved, &upper.resolved);
        prop_assert_eq!(&yes.flows, &upper.flows);
        for ((lo, mid), hi) in lower.resolved.iter().zip(&coin.resolved).zip(&upper.resolved) {
            prop_assert!(lo.inputs.is_subset(&mid.inputs) && mid.inputs.is_subset(&hi.inputs));
            prop_assert!(lo.outputs.keys().all(|k| mid.outputs.contains_key(k)));
            prop_assert!(mid.outputs.keys().all(|k| hi.outputs.contains_key(k)));
        }
        prop_assert!(lower.flows.flows.is_subset(&coin.flows.flows));
        prop_assert!(coin.flows.flows.is_subset(&upper.flows.flows));
        prop_assert!(lower.deps.deps.is_subset(&coin.deps.deps));
        prop_assert!(coin.deps.deps.is_subset(&upper.deps.deps));
    }

    #[test]
    fn lower_and_upper_match_fixed_resolvers(seed in any::<u64>()) {
        let nb = &generate_corpus(seed, 1, SynthConfig::default())[0];
        let unused = FixedResolver::new(true);
        let lower = run(nb, EstimateMode::Lower, &unused);
        let no = run(nb, EstimateMode::Resolved, &FixedResolver::new(false));
        prop_assert_eq!(&lower.resolved, &no.resolved);
        for (cell, r) in lower.analysis.cells.iter().zip(&lower.resolved) {
            if !cell.skipped {
                prop_assert_eq!(&cell.estimates.lower.inputs, &r.inputs);
                prop_assert_eq!(&cell.estimates.lower.outputs, &r.outputs);
            }
        }
    }
}

const NAMES: [&str; 4] = ["p", "q", "r", "s"];

fn straight_line() -> impl Strategy<Value = Vec<Vec<(usize, usize, usize)>>> {
    let stmt = (0..NAMES.len(), 0..NAMES.len(), 0..NAMES.len());
    proptest::collection::vec(proptest::collection::vec(stmt, 1..4), 2..8)
}

/// Flows of a notebook of plain `x = y + z` statements, by replaying it.
fn replay(cells: &[Vec<(usize, usize, usize)>]) -> BTreeSet<InformationFlow> {
    let mut last_def: BTreeMap<&str, usize> = BTreeMap::new();
    let mut flows = BTreeSet::new();
    for (i, cell) in cells.iter().enumerate() {
        let c = i + 1;
        let mut local = BTreeSet::new();
        for &(x, y, z) in cell {
            for u in [NAMES[y], NAMES[z]] {
                if !local.contains(u) {
                    if let Some(&s) = last_def.get(u) {
                        flows.insert(InformationFlow::data(s, c, u));
                    }
                }
            }
            local.insert(NAMES[x]);
        }
        for name in local {
            last_def.insert(name, c);
        }
    }
    flows
}

proptest! {
    #[test]
    fn straight_line_flows_match_replay(cells in straight_line()) {
        let sources: Vec<String> = cells
            .iter()
            .map(|c| c.iter().map(|&(x, y, z)| format!("{} = {} + {}", NAMES[x], NAMES[y], NAMES[z])).collect::<Vec<_>>().join("\n"))
            .collect();
        let nb = CellSequence::from_sources("straight", &sources);
        let r = run(&nb, EstimateMode::Resolved, &CoinResolver(0));
        prop_assert!(r.records.is_empty());
        prop_assert_eq!(r.flows.flows, replay(&cells));
    }
}
