//! Seeded generator of small random notebooks mixing assignments, calls,
//! loops, conditionals, aliases and deletions. Used for property checks and
//! benchmarks.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::notebook::CellSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub min_cells: usize,
    pub max_cells: usize,
    pub max_statements: usize,
    pub max_depth: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            min_cells: 2,
            max_cells: 10,
            max_statements: 5,
            max_depth: 2,
        }
    }
}

const VARS: [&str; 6] = ["a", "b", "df", "items", "count", "model"];
const FUNCS: [&str; 2] = ["helper", "clean"];
const METHODS: [&str; 8] = [
    "append(1)",
    "sort()",
    "update({})",
    "dropna(inplace=True)",
    "truncate(before=1)",
    "head()",
    "fit(a)",
    "drop(['x'], axis=1)",
];

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    cfg: SynthConfig,
}

impl<R: Rng> Gen<'_, R> {
    fn var(&mut self) -> &'static str {
        VARS.choose(self.rng).copied().unwrap_or("a")
    }

    fn func(&mut self) -> &'static str {
        FUNCS.choose(self.rng).copied().unwrap_or("helper")
    }

    fn expr(&mut self) -> String {
        match self.rng.random_range(0..8) {
            0 => self.rng.random_range(0..100).to_string(),
            1 => format!("{} + 1", self.var()),
            2 => format!("[{}, {}]", self.var(), self.var()),
            3 => format!("{}({})", self.func(), self.var()),
            4 => self.var().to_string(),
            5 => format!("{}.copy()", self.var()),
            6 => format!("{{'k': {}}}", self.var()),
            _ => format!("[x * 2 for x in {}]", self.var()),
        }
    }

    fn block(&mut self, depth: usize, indent: usize, out: &mut Vec<String>) {
        let n = self.rng.random_range(1..=2);
        for _ in 0..n {
            self.stmt(depth, indent, out);
        }
    }

    fn stmt(&mut self, depth: usize, indent: usize, out: &mut Vec<String>) {
        let pad = "    ".repeat(indent);
        let nested = depth < self.cfg.max_depth;
        let choice = self.rng.random_range(0..16);
        match choice {
            0..=2 => {
                let (v, e) = (self.var(), self.expr());
                out.push(format!("{pad}{v} = {e}"));
            }
            3 => out.push(format!("{pad}{} += 1", self.var())),
            4 | 5 => {
                let m = METHODS.choose(self.rng).copied().unwrap_or("head()");
                out.push(format!("{pad}{}.{m}", self.var()));
            }
            6 => out.push(format!("{pad}print({})", self.var())),
            7 => {
                let (f, x, y) = (self.func(), self.var(), self.var());
                out.push(format!("{pad}{f}({x}, key={y})"));
            }
            8 => {
                let (x, y) = (self.var(), self.var());
                out.push(format!("{pad}{x}[0] = {y}"));
            }
            9 if nested => {
                out.push(format!("{pad}for it in {}:", self.var()));
                self.block(depth + 1, indent + 1, out);
            }
            10 if nested => {
                out.push(format!("{pad}if {}:", self.var()));
                self.block(depth + 1, indent + 1, out);
                if self.rng.random_bool(0.5) {
                    out.push(format!("{pad}else:"));
                    self.block(depth + 1, indent + 1, out);
                }
            }
            11 if nested => {
                out.push(format!("{pad}while {}:", self.var()));
                self.block(depth + 1, indent + 1, out);
                out.push(format!("{pad}    break"));
            }
            12 if nested => {
                out.push(format!("{pad}try:"));
                self.block(depth + 1, indent + 1, out);
                out.push(format!("{pad}except ValueError:"));
                self.block(depth + 1, indent + 1, out);
            }
            13 if depth == 0 => {
                let (f, v) = (self.func(), self.var());
                out.push(format!("def {f}(x, key=None):"));
                out.push(format!("    return x + {v}"));
            }
            14 => {
                let (x, y) = (self.var(), self.var());
                out.push(format!("{pad}if ({x} := {y}):"));
                out.push(format!("{pad}    pass"));
            }
            15 if self.rng.random_bool(0.3) => out.push(format!("{pad}del {}", self.var())),
            _ => {
                let (v, e) = (self.var(), self.expr());
                out.push(format!("{pad}{v} = {e}"));
            }
        }
    }

    fn cell(&mut self) -> String {
        let mut lines = Vec::new();
        let n = self.rng.random_range(1..=self.cfg.max_statements);
        for _ in 0..n {
            self.stmt(0, 0, &mut lines);
        }
        lines.join("\n")
    }
}

pub fn generate_notebook<R: Rng>(rng: &mut R, notebook_id: &str, cfg: SynthConfig) -> CellSequence {
    let n = rng.random_range(cfg.min_cells..=cfg.max_cells);
    let mut g = Gen { rng, cfg };
    let sources: Vec<String> = (0..n).map(|_| g.cell()).collect();
    CellSequence::from_sources(notebook_id, &sources)
}

/// `count` notebooks from one seed; the same seed gives the same corpus.
pub fn generate_corpus(seed: u64, count: usize, cfg: SynthConfig) -> Vec<CellSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| generate_notebook(&mut rng, &format!("synth-{seed}-{i}"), cfg))
        .collect()
}

/// One notebook of `n_cells` cells and roughly `total_lines` lines.
pub fn generate_large(seed: u64, n_cells: usize, total_lines: usize) -> CellSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SynthConfig::default();
    let mut g = Gen { rng: &mut rng, cfg };
    let mut written = 0;
    let sources: Vec<String> = (0..n_cells)
        .map(|i| {
            let target = (i + 1) * total_lines / n_cells.max(1);
            let mut lines = Vec::new();
            while lines.is_empty() || written + lines.len() < target {
                // Near the budget only flat statements, so a cell ends close to it.
                let depth = if target - (written + lines.len()).min(target) > 8 {
                    0
                } else {
                    cfg.max_depth
                };
                g.stmt(depth, 0, &mut lines);
            }
            written += lines.len();
            lines.join("\n")
        })
        .collect();
    CellSequence::from_sources(format!("large-{seed}"), &sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{analyze_notebook, AnalyzerOptions};

    #[test]
    fn corpus_is_deterministic_and_parses() {
        let a = generate_corpus(7, 50, SynthConfig::default());
        let b = generate_corpus(7, 50, SynthConfig::default());
        assert_eq!(a, b);
        for nb in &a {
            assert!((2..=10).contains(&nb.len()));
            let analysis = analyze_notebook(nb, &AnalyzerOptions::default());
            assert!(analysis.cells.iter().all(|c| !c.skipped), "{:?}", nb);
        }
    }

    #[test]
    fn large_notebook_size() {
        let nb = generate_large(1, 76, 1100);
        assert_eq!(nb.len(), 76);
        let lines: usize = nb.cells.iter().map(|c| c.source.len()).sum();
        assert!((1100..1130).contains(&lines), "{lines}");
    }
}
