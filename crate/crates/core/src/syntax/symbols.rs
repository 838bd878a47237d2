//! Notebook-wide name classification, computed once over all parsed cells
//! before the per-cell walk.

use std::collections::BTreeSet;

use rustpython_parser::ast::{self, Expr, ExprContext, Stmt};
use rustpython_parser::text_size::TextRange;

use super::walk::{walk_expr, walk_stmts, BindingKind, Visitor};
use super::SyntaxTree;

const BUILTINS: &[&str] = &[
    "abs",
    "aiter",
    "all",
    "anext",
    "any",
    "ascii",
    "bin",
    "bool",
    "breakpoint",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "compile",
    "complex",
    "copyright",
    "credits",
    "delattr",
    "dict",
    "dir",
    "display",
    "divmod",
    "enumerate",
    "eval",
    "exec",
    "exit",
    "filter",
    "float",
    "format",
    "frozenset",
    "get_ipython",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "help",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "license",
    "list",
    "locals",
    "map",
    "max",
    "memoryview",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "quit",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "vars",
    "zip",
    "__import__",
    "__name__",
    "__file__",
    "__doc__",
    "__builtins__",
    "True",
    "False",
    "None",
    "Ellipsis",
    "NotImplemented",
    "BaseException",
    "Exception",
    "ArithmeticError",
    "AssertionError",
    "AttributeError",
    "BufferError",
    "EOFError",
    "FileExistsError",
    "FileNotFoundError",
    "FloatingPointError",
    "GeneratorExit",
    "ImportError",
    "IndexError",
    "IOError",
    "KeyError",
    "KeyboardInterrupt",
    "LookupError",
    "MemoryError",
    "ModuleNotFoundError",
    "NameError",
    "NotImplementedError",
    "OSError",
    "OverflowError",
    "PermissionError",
    "RecursionError",
    "ReferenceError",
    "RuntimeError",
    "StopIteration",
    "StopAsyncIteration",
    "SyntaxError",
    "SystemExit",
    "TimeoutError",
    "TypeError",
    "UnboundLocalError",
    "UnicodeDecodeError",
    "UnicodeEncodeError",
    "UnicodeError",
    "ValueError",
    "ZeroDivisionError",
    "Warning",
    "UserWarning",
    "DeprecationWarning",
    "FutureWarning",
    "RuntimeWarning",
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameClass {
    /// A notebook-level data variable.
    Data,
    /// A user-defined function or class name.
    Code,
    /// Builtins and (unless tracked) imported modules and functions.
    Ignored,
}

#[derive(Debug, Clone, Default)]
pub struct NotebookSymbols {
    /// Names declared by `def` or `class` at cell scope in any cell.
    pub code_names: BTreeSet<String>,
    /// Names bound by an import at cell scope in any cell.
    pub import_names: BTreeSet<String>,
    /// Names bound as data at cell scope in any cell.
    pub bound_names: BTreeSet<String>,
    pub track_imports: bool,
}

impl NotebookSymbols {
    pub fn collect<'t>(trees: impl IntoIterator<Item = &'t SyntaxTree>, track_imports: bool) -> Self {
        let mut symbols = NotebookSymbols {
            track_imports,
            ..Default::default()
        };
        for tree in trees {
            walk_stmts(&tree.suite, &mut PrePass(&mut symbols));
        }
        symbols
    }

    /// A name declared as a function or class anywhere in the notebook is
    /// treated as code everywhere; data uses of it are reported as reuse.
    pub fn classify(&self, name: &str) -> NameClass {
        if self.code_names.contains(name) {
            NameClass::Code
        } else if self.import_names.contains(name) {
            if self.track_imports {
                NameClass::Data
            } else {
                NameClass::Ignored
            }
        } else if is_builtin(name) && !self.bound_names.contains(name) {
            NameClass::Ignored
        } else {
            NameClass::Data
        }
    }
}

struct PrePass<'s>(&'s mut NotebookSymbols);

impl<'a> Visitor<'a> for PrePass<'_> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) -> bool {
        match stmt {
            Stmt::FunctionDef(s) => {
                self.0.code_names.insert(s.name.to_string());
                false
            }
            Stmt::AsyncFunctionDef(s) => {
                self.0.code_names.insert(s.name.to_string());
                false
            }
            Stmt::ClassDef(s) => {
                self.0.code_names.insert(s.name.to_string());
                false
            }
            _ => true,
        }
    }

    fn visit_expr(&mut self, expr: &'a Expr) -> bool {
        match expr {
            Expr::Name(n) if n.ctx == ExprContext::Store => {
                self.0.bound_names.insert(n.id.to_string());
                true
            }
            // Comprehension targets are local to the comprehension.
            Expr::ListComp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::SetComp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::GeneratorExp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::DictComp(e) => self.comprehension(&e.generators, &[&e.key, &e.value]),
            Expr::Lambda(e) => {
                walk_expr(&e.body, self);
                false
            }
            _ => true,
        }
    }

    fn visit_binding(&mut self, id: &'a str, kind: BindingKind, _range: TextRange) {
        match kind {
            BindingKind::Import => {
                self.0.import_names.insert(id.to_string());
            }
            BindingKind::Except | BindingKind::Capture => {
                self.0.bound_names.insert(id.to_string());
            }
            _ => {}
        }
    }
}

impl<'a> PrePass<'_> {
    fn comprehension(&mut self, generators: &'a [ast::Comprehension], elts: &[&'a Expr]) -> bool {
        for g in generators {
            walk_expr(&g.iter, self);
            for cond in &g.ifs {
                walk_expr(cond, self);
            }
        }
        for e in elts {
            walk_expr(e, self);
        }
        false
    }
}
