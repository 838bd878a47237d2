//! Offline resolver driven by tables of call patterns known to change their
//! receiver or argument in place, and of calls known not to.

use std::collections::BTreeSet;

use rustpython_parser::ast::{self, Constant, Expr, Stmt};
use rustpython_parser::text_size::TextRange;
use rustpython_parser::Parse;

use super::{Answer, Query, Resolve};
use crate::ambiguity::AmbiguityKind;
use crate::error::Result;
use crate::syntax::parse_cell;
use crate::syntax::walk::{chain_root, target_names, walk_expr, walk_stmts, Visitor};

/// Methods that change their receiver.
const MUTATING_METHODS: &[&str] = &[
    "append",
    "extend",
    "insert",
    "remove",
    "pop",
    "popitem",
    "clear",
    "update",
    "sort",
    "reverse",
    "add",
    "discard",
    "setdefault",
    "fit",
    "fit_transform",
    "partial_fit",
    "compile",
    "resize",
    "fill",
    "put",
    "itemset",
    "shuffle",
    "set_params",
    "load_state_dict",
    "add_module",
    "register_buffer",
    "__setitem__",
    "__delitem__",
];

/// Methods that return a new object and leave the receiver alone, unless
/// called with `inplace=True`.
const PURE_METHODS: &[&str] = &[
    "head",
    "tail",
    "describe",
    "info",
    "copy",
    "truncate",
    "sum",
    "mean",
    "median",
    "std",
    "var",
    "min",
    "max",
    "count",
    "value_counts",
    "unique",
    "nunique",
    "groupby",
    "merge",
    "join",
    "plot",
    "hist",
    "corr",
    "isnull",
    "isna",
    "notnull",
    "notna",
    "any",
    "all",
    "astype",
    "apply",
    "map",
    "to_csv",
    "to_numpy",
    "tolist",
    "keys",
    "values",
    "items",
    "get",
    "predict",
    "predict_proba",
    "score",
    "transform",
    "sample",
    "query",
    "dropna",
    "drop",
    "fillna",
    "rename",
    "reset_index",
    "set_index",
    "sort_values",
    "sort_index",
    "replace",
    "round",
    "format",
    "split",
    "strip",
    "lower",
    "upper",
    "startswith",
    "endswith",
    "show",
    "pivot",
    "pivot_table",
    "melt",
    "agg",
    "aggregate",
    "filter",
    "where",
    "mask",
    "clip",
    "abs",
    "cumsum",
    "diff",
    "shift",
    "rolling",
    "resample",
    "duplicated",
    "drop_duplicates",
    "nlargest",
    "nsmallest",
    "idxmax",
    "idxmin",
    "reshape",
    "flatten",
    "ravel",
    "dot",
    "mode",
    "quantile",
];

/// Functions that change an argument in place.
const MUTATING_FUNCTIONS: &[&str] = &[
    "shuffle",
    "heappush",
    "heappop",
    "heapify",
    "heapreplace",
    "setattr",
    "delattr",
];

/// Functions that only read their arguments.
const PURE_FUNCTIONS: &[&str] = &[
    "print",
    "len",
    "display",
    "str",
    "repr",
    "type",
    "isinstance",
    "sorted",
    "list",
    "tuple",
    "set",
    "dict",
    "sum",
    "min",
    "max",
    "abs",
    "round",
    "enumerate",
    "zip",
    "range",
    "concat",
    "merge",
    "DataFrame",
    "Series",
    "array",
    "asarray",
    "mean",
    "std",
    "plot",
    "scatter",
    "barplot",
    "countplot",
    "heatmap",
    "histplot",
    "boxplot",
    "distplot",
    "lineplot",
    "train_test_split",
    "accuracy_score",
    "mean_squared_error",
    "cross_val_score",
    "deepcopy",
    "copy",
    "hash",
    "id",
    "iter",
    "format",
    "any",
    "all",
    "map",
    "filter",
];

#[derive(Debug, Clone)]
pub struct HeuristicResolver {
    default: bool,
}

impl HeuristicResolver {
    pub fn new(default: bool) -> Self {
        Self { default }
    }
}

impl Resolve for HeuristicResolver {
    fn id(&self) -> &str {
        "heuristic"
    }

    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        let a = query.ambiguity;
        let fallback = |why: &str| {
            let word = if self.default { "yes" } else { "no" };
            Answer::of(self.default, format!("{word} (default: {why})"))
        };
        if a.kind == AmbiguityKind::Input {
            return Ok(fallback("no rule for inputs"));
        }
        let Ok(tree) = parse_cell(query.cell) else {
            return Ok(fallback("cell does not parse"));
        };

        let mut subjects = BTreeSet::from([a.name.clone()]);
        for statement in a.alias_context.iter().flatten() {
            if let Ok(suite) = ast::Suite::parse(statement, "<alias>") {
                let mut names = Names::default();
                walk_stmts(&suite, &mut names);
                subjects.extend(names.0);
            }
        }
        // Names bound to a subject inside the cell itself.
        loop {
            let mut local = LocalAliases {
                subjects: &subjects,
                found: BTreeSet::new(),
            };
            walk_stmts(&tree.suite, &mut local);
            let before = subjects.len();
            subjects.extend(local.found);
            if subjects.len() == before {
                break;
            }
        }

        let mut ev = Evidence {
            subjects: &subjects,
            mutating: None,
            pure: None,
        };
        walk_stmts(&tree.suite, &mut ev);
        Ok(if let Some(range) = ev.mutating {
            Answer::of(true, format!("yes (changes in place: `{}`)", tree.slice(range)))
        } else if let Some(range) = ev.pure {
            Answer::of(false, format!("no (read only: `{}`)", tree.slice(range)))
        } else {
            fallback("no known call pattern")
        })
    }
}

#[derive(Default)]
struct Names(BTreeSet<String>);

impl<'a> Visitor<'a> for Names {
    fn visit_expr(&mut self, e: &'a Expr) -> bool {
        if let Expr::Name(n) = e {
            self.0.insert(n.id.to_string());
        }
        true
    }
}

struct LocalAliases<'s> {
    subjects: &'s BTreeSet<String>,
    found: BTreeSet<String>,
}

impl LocalAliases<'_> {
    fn rooted(&self, e: &Expr) -> bool {
        chain_root(e).is_some_and(|n| self.subjects.contains(n.id.as_str()))
    }
}

impl<'a> Visitor<'a> for LocalAliases<'_> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) -> bool {
        match stmt {
            Stmt::FunctionDef(_) | Stmt::AsyncFunctionDef(_) | Stmt::ClassDef(_) => return false,
            Stmt::For(s) if self.rooted(&s.iter) => {
                self.found
                    .extend(target_names(&s.target).iter().map(|n| n.id.to_string()));
            }
            Stmt::Assign(s) if matches!(*s.value, Expr::Name(_)) && self.rooted(&s.value) => {
                for t in &s.targets {
                    self.found.extend(target_names(t).iter().map(|n| n.id.to_string()));
                }
            }
            _ => {}
        }
        true
    }
}

struct Evidence<'s> {
    subjects: &'s BTreeSet<String>,
    mutating: Option<TextRange>,
    pure: Option<TextRange>,
}

impl Evidence<'_> {
    fn rooted(&self, e: &Expr) -> bool {
        chain_root(e).is_some_and(|n| self.subjects.contains(n.id.as_str()))
    }

    fn note(&mut self, mutating: bool, range: TextRange) {
        let slot = if mutating { &mut self.mutating } else { &mut self.pure };
        slot.get_or_insert(range);
    }

    fn call(&mut self, call: &ast::ExprCall) {
        let inplace = call.keywords.iter().any(|k| {
            k.arg.as_deref() == Some("inplace")
                && matches!(&k.value, Expr::Constant(c) if c.value == Constant::Bool(true))
        });
        if let Expr::Attribute(m) = &*call.func {
            if self.rooted(&m.value) {
                let method = m.attr.as_str();
                if inplace || MUTATING_METHODS.contains(&method) {
                    self.note(true, call.range);
                } else if PURE_METHODS.contains(&method) {
                    self.note(false, call.range);
                }
            }
        }
        let passes_subject = call
            .args
            .iter()
            .chain(call.keywords.iter().map(|k| &k.value))
            .any(|a| self.rooted(a) || collection_holds(a, self));
        if passes_subject {
            let func = match &*call.func {
                Expr::Name(n) => Some(n.id.as_str()),
                Expr::Attribute(a) => Some(a.attr.as_str()),
                _ => None,
            };
            if let Some(f) = func {
                if MUTATING_FUNCTIONS.contains(&f) {
                    self.note(true, call.range);
                } else if PURE_FUNCTIONS.contains(&f) || PURE_METHODS.contains(&f) {
                    self.note(false, call.range);
                }
            }
        }
    }
}

fn collection_holds(e: &Expr, ev: &Evidence<'_>) -> bool {
    match e {
        Expr::List(l) => l.elts.iter().any(|x| ev.rooted(x)),
        Expr::Tuple(t) => t.elts.iter().any(|x| ev.rooted(x)),
        _ => false,
    }
}

impl<'a> Visitor<'a> for Evidence<'_> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) -> bool {
        match stmt {
            Stmt::FunctionDef(_) | Stmt::AsyncFunctionDef(_) | Stmt::ClassDef(_) => return false,
            Stmt::Assign(s) => {
                for t in &s.targets {
                    if matches!(t, Expr::Subscript(_) | Expr::Attribute(_)) && self.rooted(t) {
                        self.note(true, s.range);
                    }
                }
            }
            Stmt::AugAssign(s) if self.rooted(&s.target) => self.note(true, s.range),
            Stmt::Delete(s) => {
                for t in &s.targets {
                    if matches!(t, Expr::Subscript(_) | Expr::Attribute(_)) && self.rooted(t) {
                        self.note(true, s.range);
                    }
                }
            }
            Stmt::For(s) if self.rooted(&s.iter) => self.note(false, s.range),
            _ => {}
        }
        true
    }

    fn visit_expr(&mut self, e: &'a Expr) -> bool {
        if let Expr::Call(c) = e {
            self.call(c);
        }
        if let Expr::Lambda(l) = e {
            walk_expr(&l.body, self);
            return false;
        }
        true
    }
}
