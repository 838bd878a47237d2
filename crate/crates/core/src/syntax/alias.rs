//! Shared-reference tracking across cells. Two names are linked when one is
//! assigned from the other or one is a collection literal containing the
//! other; connected names may observe each other's in-place changes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustpython_parser::ast::{Expr, Ranged, Stmt};
use serde::{Deserialize, Serialize};

use super::symbols::{NameClass, NotebookSymbols};
use super::SyntaxTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliasKind {
    Assignment,
    CollectionContainment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasEdge {
    pub a: String,
    pub b: String,
    pub kind: AliasKind,
    pub cell: usize,
    /// Source text of the statement that created the edge.
    pub statement: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasStore {
    edges: Vec<AliasEdge>,
}

impl AliasStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[AliasEdge] {
        &self.edges
    }

    pub fn add(&mut self, edge: AliasEdge) {
        if edge.a != edge.b && !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
    }

    /// Drops every edge touching `name`, after it is rebound or deleted.
    pub fn sever(&mut self, name: &str) {
        self.edges.retain(|e| e.a != name && e.b != name);
    }

    /// Names connected to `name`, including `name` itself.
    pub fn component(&self, name: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([name.to_string()]);
        let mut queue = VecDeque::from([name.to_string()]);
        while let Some(n) = queue.pop_front() {
            for e in &self.edges {
                let other = if e.a == n {
                    &e.b
                } else if e.b == n {
                    &e.a
                } else {
                    continue;
                };
                if seen.insert(other.clone()) {
                    queue.push_back(other.clone());
                }
            }
        }
        seen
    }

    pub fn aliases_of(&self, name: &str) -> BTreeSet<String> {
        let mut c = self.component(name);
        c.remove(name);
        c
    }

    /// Statements from cells before `cell` that connect `name` to its
    /// aliases, in creation order.
    pub fn context_before(&self, name: &str, cell: usize) -> Vec<String> {
        let component = self.component(name);
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if e.cell < cell && component.contains(&e.a) && !out.contains(&e.statement) {
                out.push(e.statement.clone());
            }
        }
        out
    }

    /// Statements creating edges, grouped by each identifier they mention.
    pub fn statements(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for e in &self.edges {
            for n in [&e.a, &e.b] {
                let list = out.entry(n.clone()).or_default();
                if !list.contains(&e.statement) {
                    list.push(e.statement.clone());
                }
            }
        }
        out
    }
}

/// Returns `store` extended with the alias edges created by one cell.
pub fn update_alias_store(tree: &SyntaxTree, store: &AliasStore, symbols: &NotebookSymbols) -> AliasStore {
    let mut next = store.clone();
    let mut u = Updater {
        tree,
        symbols,
        store: &mut next,
    };
    u.stmts(&tree.suite, false);
    next
}

struct Updater<'a> {
    tree: &'a SyntaxTree,
    symbols: &'a NotebookSymbols,
    store: &'a mut AliasStore,
}

impl Updater<'_> {
    fn is_data(&self, name: &str) -> bool {
        self.symbols.classify(name) == NameClass::Data
    }

    fn stmts(&mut self, body: &[Stmt], conditional: bool) {
        for s in body {
            self.stmt(s, conditional);
        }
    }

    fn stmt(&mut self, stmt: &Stmt, conditional: bool) {
        match stmt {
            Stmt::Assign(s) => {
                let mut links = Vec::new();
                for t in &s.targets {
                    pair_up(t, &s.value, &mut links);
                }
                self.apply(stmt, &links, conditional);
            }
            Stmt::AnnAssign(s) => {
                if let Some(value) = &s.value {
                    let mut links = Vec::new();
                    pair_up(&s.target, value, &mut links);
                    self.apply(stmt, &links, conditional);
                }
            }
            Stmt::Delete(s) if !conditional => {
                for t in &s.targets {
                    if let Expr::Name(n) = t {
                        self.store.sever(&n.id);
                    }
                }
            }
            Stmt::With(s) => {
                if !conditional {
                    for item in &s.items {
                        if let Some(Expr::Name(n)) = item.optional_vars.as_deref() {
                            self.store.sever(&n.id);
                        }
                    }
                }
                self.stmts(&s.body, conditional);
            }
            Stmt::AsyncWith(s) => self.stmts(&s.body, conditional),
            Stmt::For(s) => {
                self.stmts(&s.body, true);
                self.stmts(&s.orelse, true);
            }
            Stmt::AsyncFor(s) => {
                self.stmts(&s.body, true);
                self.stmts(&s.orelse, true);
            }
            Stmt::While(s) => {
                self.stmts(&s.body, true);
                self.stmts(&s.orelse, true);
            }
            Stmt::If(s) => {
                self.stmts(&s.body, true);
                self.stmts(&s.orelse, true);
            }
            Stmt::Try(s) => {
                self.stmts(&s.body, true);
                for rustpython_parser::ast::ExceptHandler::ExceptHandler(h) in &s.handlers {
                    self.stmts(&h.body, true);
                }
                self.stmts(&s.orelse, true);
                self.stmts(&s.finalbody, conditional);
            }
            Stmt::Match(s) => {
                for case in &s.cases {
                    self.stmts(&case.body, true);
                }
            }
            _ => {}
        }
    }

    fn apply(&mut self, stmt: &Stmt, links: &[Link<'_>], conditional: bool) {
        if !conditional {
            for link in links {
                if self.is_data(link.target) {
                    self.store.sever(link.target);
                }
            }
        }
        let statement = self.tree.slice(stmt.range()).to_string();
        for link in links {
            if let Some(source) = link.source {
                if self.is_data(link.target) && self.is_data(source) {
                    self.store.add(AliasEdge {
                        a: link.target.to_string(),
                        b: source.to_string(),
                        kind: link.kind,
                        cell: self.tree.cell_index,
                        statement: statement.clone(),
                    });
                }
            }
        }
    }
}

/// A bound name and, if the bound value shares a reference, its source.
struct Link<'a> {
    target: &'a str,
    source: Option<&'a str>,
    kind: AliasKind,
}

fn pair_up<'a>(target: &'a Expr, value: &'a Expr, out: &mut Vec<Link<'a>>) {
    match (target, value) {
        (Expr::Name(t), _) => {
            let before = out.len();
            link_value(&t.id, value, AliasKind::Assignment, out);
            if out.len() == before {
                out.push(Link {
                    target: &t.id,
                    source: None,
                    kind: AliasKind::Assignment,
                });
            }
        }
        (Expr::Tuple(_) | Expr::List(_), Expr::Tuple(_) | Expr::List(_)) => {
            let (te, ve) = (elements(target), elements(value));
            if te.len() == ve.len() && !te.iter().chain(&ve).any(|e| matches!(e, Expr::Starred(_))) {
                for (t, v) in te.iter().zip(&ve) {
                    pair_up(t, v, out);
                }
            } else {
                unlink_all(target, out);
            }
        }
        _ => unlink_all(target, out),
    }
}

fn link_value<'a>(target: &'a str, value: &'a Expr, kind: AliasKind, out: &mut Vec<Link<'a>>) {
    match value {
        Expr::Name(n) => out.push(Link {
            target,
            source: Some(&n.id),
            kind,
        }),
        Expr::Starred(s) => link_value(target, &s.value, kind, out),
        Expr::List(_) | Expr::Tuple(_) | Expr::Set(_) => {
            for e in elements(value) {
                link_value(target, e, AliasKind::CollectionContainment, out);
            }
        }
        Expr::Dict(d) => {
            for v in &d.values {
                link_value(target, v, AliasKind::CollectionContainment, out);
            }
        }
        _ => {}
    }
}

fn unlink_all<'a>(target: &'a Expr, out: &mut Vec<Link<'a>>) {
    for n in super::walk::target_names(target) {
        out.push(Link {
            target: &n.id,
            source: None,
            kind: AliasKind::Assignment,
        });
    }
}

fn elements(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::List(l) => l.elts.iter().collect(),
        Expr::Tuple(t) => t.elts.iter().collect(),
        Expr::Set(s) => s.elts.iter().collect(),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notebook::{screen_cell, CodeCell};
    use crate::syntax::parse_cell;

    fn run(cells: &[&str]) -> AliasStore {
        let trees: Vec<_> = cells
            .iter()
            .enumerate()
            .map(|(i, src)| parse_cell(&screen_cell(CodeCell::from_text(i + 1, src))).unwrap())
            .collect();
        let symbols = NotebookSymbols::collect(&trees, false);
        trees
            .iter()
            .fold(AliasStore::new(), |store, t| update_alias_store(t, &store, &symbols))
    }

    #[test]
    fn containment_edges_connect_members() {
        let s = run(&["train = f()\ntest = f()\ndatasets = [train, test]"]);
        assert_eq!(s.edges().len(), 2);
        assert!(s.edges().iter().all(|e| e.kind == AliasKind::CollectionContainment));
        let c = s.component("train");
        assert!(c.contains("test") && c.contains("datasets"));
    }

    #[test]
    fn rebinding_severs() {
        let s = run(&["a = [1]\nb = a", "a = [2]"]);
        assert!(s.aliases_of("b").is_empty());
    }

    #[test]
    fn conditional_rebinding_keeps_edges() {
        let s = run(&["a = [1]\nb = a", "if c:\n    a = [2]"]);
        assert_eq!(s.aliases_of("b"), BTreeSet::from(["a".to_string()]));
    }

    #[test]
    fn tuple_assignment_pairs_elements() {
        let s = run(&["x = 1\ny = 2", "p, q = x, y"]);
        assert_eq!(s.aliases_of("p"), BTreeSet::from(["x".to_string()]));
        assert_eq!(s.aliases_of("q"), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn context_only_lists_earlier_cells() {
        let s = run(&["a = [1]\nb = a", "c = b"]);
        assert_eq!(s.context_before("c", 2), vec!["b = a".to_string()]);
        assert!(s.context_before("c", 1).is_empty());
    }
}
