//! Per-cell walk producing the ordered list of name events. Events follow
//! Python evaluation order: the right-hand side of an assignment before its
//! targets, the iterable before the loop body, and so on.

use std::collections::BTreeSet;

use rustpython_parser::ast::{self, Expr, ExprContext, Stmt};
use rustpython_parser::text_size::TextRange;
use serde::{Deserialize, Serialize};

use super::symbols::{NameClass, NotebookSymbols};
use super::walk::{
    chain_root, import_binding, pattern_captures, target_names, walk_arguments, walk_stmts, BindingKind, Visitor,
};
use super::SyntaxTree;
use crate::diagnostics::{Diagnostic, DiagnosticCode, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Define,
    Use,
    /// Possible rebinding or in-place change: loop targets, item and
    /// attribute stores.
    MaybeDefine,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameKind {
    Data,
    Code,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conditionality {
    Unconditional,
    Conditional,
    LoopConditional,
}

/// Syntactic role of the occurrence, used by the estimate rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventRole {
    Read,
    CallArgument,
    MethodBase,
    Iterable,
    Binding,
    AugTarget,
    ItemStore,
    LoopTarget,
    Deletion,
    Declaration,
}

/// One enclosing control structure of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "frame")]
pub enum Frame {
    Loop {
        id: u32,
    },
    /// Arm `arm` of an `arms`-way choice. An `if` without `else` still has
    /// two arms, the second one empty.
    Branch {
        id: u32,
        arm: u32,
        arms: u32,
    },
}

impl Frame {
    pub fn id(&self) -> u32 {
        match *self {
            Frame::Loop { id } | Frame::Branch { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameEvent {
    pub name: String,
    pub action: Action,
    pub kind: NameKind,
    pub conditionality: Conditionality,
    pub position: Position,
    pub role: EventRole,
    /// Enclosing loops and branch arms, outermost first.
    pub path: Vec<Frame>,
}

impl NameEvent {
    pub fn is_data(&self) -> bool {
        self.kind == NameKind::Data
    }

    /// Events that (possibly) bind the name itself, as opposed to changing
    /// the object it refers to.
    pub fn binds(&self) -> bool {
        match self.action {
            Action::Define => true,
            Action::MaybeDefine => self.role == EventRole::LoopTarget,
            _ => false,
        }
    }
}

/// Walks one parsed cell. Diagnostics about unsupported constructs are
/// appended to `diagnostics`.
pub fn collect_name_events(
    tree: &SyntaxTree,
    symbols: &NotebookSymbols,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<NameEvent> {
    let mut c = Collector {
        tree,
        symbols,
        path: Vec::new(),
        next_frame: 0,
        locals: Vec::new(),
        events: Vec::new(),
        diagnostics,
        reused: BTreeSet::new(),
    };
    c.stmts(&tree.suite);
    c.events
}

struct Collector<'a, 'd> {
    tree: &'a SyntaxTree,
    symbols: &'a NotebookSymbols,
    path: Vec<Frame>,
    next_frame: u32,
    locals: Vec<BTreeSet<String>>,
    events: Vec<NameEvent>,
    diagnostics: &'d mut Vec<Diagnostic>,
    reused: BTreeSet<String>,
}

impl Collector<'_, '_> {
    fn frame_id(&mut self) -> u32 {
        self.next_frame += 1;
        self.next_frame
    }

    fn conditionality(&self) -> Conditionality {
        if self.path.iter().any(|f| matches!(f, Frame::Loop { .. })) {
            Conditionality::LoopConditional
        } else if self.path.is_empty() {
            Conditionality::Unconditional
        } else {
            Conditionality::Conditional
        }
    }

    fn is_local(&self, name: &str) -> bool {
        self.locals.iter().any(|scope| scope.contains(name))
    }

    fn emit(&mut self, name: &str, action: Action, role: EventRole, range: TextRange) {
        if action == Action::Use && self.is_local(name) {
            return;
        }
        let kind = match self.symbols.classify(name) {
            NameClass::Ignored => return,
            NameClass::Data => NameKind::Data,
            NameClass::Code => {
                if action != Action::Use && role != EventRole::Declaration {
                    if self.reused.insert(name.to_string()) {
                        let pos = self.tree.position(range.start().to_usize());
                        self.diagnostics.push(
                            Diagnostic::new(
                                self.tree.cell_index,
                                DiagnosticCode::NameReuse,
                                format!(
                                    "`{name}` is declared as a function or class elsewhere; \
                                     its data binding here is not tracked"
                                ),
                            )
                            .at(pos),
                        );
                    }
                    return;
                }
                NameKind::Code
            }
        };
        let position = self.tree.position(range.start().to_usize());
        self.events.push(NameEvent {
            name: name.to_string(),
            action,
            kind,
            conditionality: self.conditionality(),
            position,
            role,
            path: self.path.clone(),
        });
    }

    fn in_frame(&mut self, frame: Frame, f: impl FnOnce(&mut Self)) {
        self.path.push(frame);
        f(self);
        self.path.pop();
    }

    fn stmts(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::FunctionDef(f) => self.function(
                &f.name,
                &f.args,
                &f.decorator_list,
                f.returns.as_deref(),
                &f.body,
                f.range,
            ),
            Stmt::AsyncFunctionDef(f) => self.function(
                &f.name,
                &f.args,
                &f.decorator_list,
                f.returns.as_deref(),
                &f.body,
                f.range,
            ),
            Stmt::ClassDef(c) => {
                self.reads(&c.decorator_list);
                self.reads(&c.bases);
                for k in &c.keywords {
                    self.expr(&k.value, EventRole::Read);
                }
                self.emit(&c.name, Action::Define, EventRole::Declaration, c.range);
                self.scan_body(&c.name, None, &c.body);
            }
            Stmt::Return(s) => self.opt_read(s.value.as_deref()),
            Stmt::Delete(s) => {
                for t in &s.targets {
                    self.delete_target(t);
                }
            }
            Stmt::Assign(s) => {
                self.expr(&s.value, EventRole::Read);
                for t in &s.targets {
                    self.store_target(t, Action::Define, EventRole::Binding);
                }
            }
            Stmt::TypeAlias(_) => {}
            Stmt::AugAssign(s) => self.aug_assign(&s.target, &s.value),
            Stmt::AnnAssign(s) => {
                self.expr(&s.annotation, EventRole::Read);
                if let Some(value) = &s.value {
                    self.expr(value, EventRole::Read);
                    self.store_target(&s.target, Action::Define, EventRole::Binding);
                }
            }
            Stmt::For(s) => self.for_loop(&s.iter, &s.target, &s.body, &s.orelse),
            Stmt::AsyncFor(s) => self.for_loop(&s.iter, &s.target, &s.body, &s.orelse),
            Stmt::While(s) => {
                self.expr(&s.test, EventRole::Iterable);
                let id = self.frame_id();
                self.in_frame(Frame::Loop { id }, |c| {
                    c.stmts(&s.body);
                    // Re-evaluation of the condition after each iteration.
                    c.expr(&s.test, EventRole::Iterable);
                });
                self.else_clause(&s.orelse);
            }
            Stmt::If(s) => {
                self.expr(&s.test, EventRole::Read);
                let id = self.frame_id();
                self.in_frame(Frame::Branch { id, arm: 0, arms: 2 }, |c| c.stmts(&s.body));
                self.in_frame(Frame::Branch { id, arm: 1, arms: 2 }, |c| c.stmts(&s.orelse));
            }
            Stmt::With(s) => self.with(&s.items, &s.body),
            Stmt::AsyncWith(s) => self.with(&s.items, &s.body),
            Stmt::Match(s) => {
                self.expr(&s.subject, EventRole::Read);
                let id = self.frame_id();
                let arms = s.cases.len() as u32 + 1;
                for (arm, case) in s.cases.iter().enumerate() {
                    self.in_frame(
                        Frame::Branch {
                            id,
                            arm: arm as u32,
                            arms,
                        },
                        |c| {
                            c.pattern_reads(&case.pattern);
                            for (name, range) in pattern_captures(&case.pattern) {
                                c.emit(name, Action::Define, EventRole::Binding, range);
                            }
                            c.opt_read(case.guard.as_deref());
                            c.stmts(&case.body);
                        },
                    );
                }
            }
            Stmt::Raise(s) => {
                self.opt_read(s.exc.as_deref());
                self.opt_read(s.cause.as_deref());
            }
            Stmt::Try(s) => self.try_stmt(&s.body, &s.handlers, &s.orelse, &s.finalbody),
            Stmt::TryStar(s) => self.try_stmt(&s.body, &s.handlers, &s.orelse, &s.finalbody),
            Stmt::Assert(s) => {
                self.expr(&s.test, EventRole::Read);
                self.opt_read(s.msg.as_deref());
            }
            Stmt::Import(s) => {
                for alias in &s.names {
                    self.emit(import_binding(alias), Action::Define, EventRole::Binding, alias.range);
                }
            }
            Stmt::ImportFrom(s) => {
                for alias in &s.names {
                    if alias.name.as_str() != "*" {
                        self.emit(import_binding(alias), Action::Define, EventRole::Binding, alias.range);
                    }
                }
            }
            // `global` at cell scope is a no-op.
            Stmt::Global(_) | Stmt::Nonlocal(_) => {}
            Stmt::Expr(s) => self.expr(&s.value, EventRole::Read),
            Stmt::Pass(_) | Stmt::Break(_) | Stmt::Continue(_) => {}
        }
    }

    fn function(
        &mut self,
        name: &ast::Identifier,
        args: &ast::Arguments,
        decorators: &[Expr],
        returns: Option<&Expr>,
        body: &[Stmt],
        range: TextRange,
    ) {
        self.reads(decorators);
        self.argument_reads(args);
        self.opt_read(returns);
        self.emit(name, Action::Define, EventRole::Declaration, range);
        self.scan_body(name, Some(args), body);
    }

    /// Defaults and annotations are evaluated at definition time.
    fn argument_reads(&mut self, args: &ast::Arguments) {
        for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
            self.opt_read(a.default.as_deref());
            self.opt_read(a.def.annotation.as_deref());
        }
        for a in args.vararg.iter().chain(&args.kwarg) {
            self.opt_read(a.annotation.as_deref());
        }
    }

    /// Function and class bodies contribute only code references. Reads of
    /// notebook-level data from inside a body are reported, not tracked.
    fn scan_body(&mut self, owner: &str, args: Option<&ast::Arguments>, body: &[Stmt]) {
        let mut scan = BodyScan::default();
        if let Some(args) = args {
            walk_arguments(args, &mut scan);
        }
        walk_stmts(body, &mut scan);

        for range in &scan.globals {
            let pos = self.tree.position(range.start().to_usize());
            self.diagnostics.push(
                Diagnostic::new(
                    self.tree.cell_index,
                    DiagnosticCode::GlobalInFunction,
                    format!("`{owner}` declares global or nonlocal names; flows through them are not tracked"),
                )
                .at(pos),
            );
        }
        let mut reported = BTreeSet::new();
        for name in scan.loads {
            let id = name.id.as_str();
            if scan.bound.contains(id) && !scan.global_names.contains(id) {
                continue;
            }
            match self.symbols.classify(id) {
                NameClass::Code => self.emit(id, Action::Use, EventRole::Read, name.range),
                NameClass::Data if reported.insert(id) => {
                    let pos = self.tree.position(name.range.start().to_usize());
                    self.diagnostics.push(
                        Diagnostic::new(
                            self.tree.cell_index,
                            DiagnosticCode::FunctionFreeVariable,
                            format!("`{owner}` reads notebook-level `{id}` directly"),
                        )
                        .at(pos),
                    );
                }
                _ => {}
            }
        }
    }

    fn for_loop(&mut self, iter: &Expr, target: &Expr, body: &[Stmt], orelse: &[Stmt]) {
        self.expr(iter, EventRole::Iterable);
        let id = self.frame_id();
        self.in_frame(Frame::Loop { id }, |c| {
            c.store_target(target, Action::MaybeDefine, EventRole::LoopTarget);
            c.stmts(body);
        });
        self.else_clause(orelse);
    }

    fn else_clause(&mut self, orelse: &[Stmt]) {
        if orelse.is_empty() {
            return;
        }
        let id = self.frame_id();
        self.in_frame(Frame::Branch { id, arm: 0, arms: 2 }, |c| c.stmts(orelse));
    }

    fn with(&mut self, items: &[ast::WithItem], body: &[Stmt]) {
        for item in items {
            self.expr(&item.context_expr, EventRole::Read);
            if let Some(vars) = &item.optional_vars {
                self.store_target(vars, Action::Define, EventRole::Binding);
            }
        }
        self.stmts(body);
    }

    /// The try body plus `else` form one arm, each handler another; the
    /// `finally` block always runs afterwards.
    fn try_stmt(&mut self, body: &[Stmt], handlers: &[ast::ExceptHandler], orelse: &[Stmt], finalbody: &[Stmt]) {
        let id = self.frame_id();
        let arms = handlers.len() as u32 + 1;
        self.in_frame(Frame::Branch { id, arm: 0, arms }, |c| {
            c.stmts(body);
            c.stmts(orelse);
        });
        for (i, ast::ExceptHandler::ExceptHandler(h)) in handlers.iter().enumerate() {
            self.in_frame(
                Frame::Branch {
                    id,
                    arm: i as u32 + 1,
                    arms,
                },
                |c| {
                    c.opt_read(h.type_.as_deref());
                    c.stmts(&h.body);
                },
            );
        }
        self.stmts(finalbody);
    }

    fn aug_assign(&mut self, target: &Expr, value: &Expr) {
        match target {
            Expr::Name(n) => {
                self.emit(&n.id, Action::Use, EventRole::Read, n.range);
                self.expr(value, EventRole::Read);
                self.emit(&n.id, Action::Define, EventRole::AugTarget, n.range);
            }
            _ => {
                self.expr(value, EventRole::Read);
                self.store_target(target, Action::MaybeDefine, EventRole::ItemStore);
            }
        }
    }

    fn store_target(&mut self, target: &Expr, action: Action, role: EventRole) {
        match target {
            Expr::Name(n) => self.emit(&n.id, action, role, n.range),
            Expr::Tuple(t) => t.elts.iter().for_each(|e| self.store_target(e, action, role)),
            Expr::List(t) => t.elts.iter().for_each(|e| self.store_target(e, action, role)),
            Expr::Starred(s) => self.store_target(&s.value, action, role),
            Expr::Attribute(_) | Expr::Subscript(_) => self.item_store(target),
            other => self.expr(other, EventRole::Read),
        }
    }

    /// `a.b[k] = v`: `a` is read and changed in place.
    fn item_store(&mut self, target: &Expr) {
        self.chain_reads(target);
        match chain_root(target) {
            Some(root) => {
                self.emit(&root.id, Action::Use, EventRole::Read, root.range);
                self.emit(&root.id, Action::MaybeDefine, EventRole::ItemStore, root.range);
            }
            None => self.chain_base_read(target),
        }
    }

    fn delete_target(&mut self, target: &Expr) {
        match target {
            Expr::Name(n) => self.emit(&n.id, Action::Delete, EventRole::Deletion, n.range),
            Expr::Tuple(t) => t.elts.iter().for_each(|e| self.delete_target(e)),
            Expr::List(t) => t.elts.iter().for_each(|e| self.delete_target(e)),
            Expr::Attribute(_) | Expr::Subscript(_) => self.item_store(target),
            other => self.expr(other, EventRole::Read),
        }
    }

    /// Subscript indices along a reference chain are ordinary reads.
    fn chain_reads(&mut self, expr: &Expr) {
        match expr {
            Expr::Attribute(e) => self.chain_reads(&e.value),
            Expr::Subscript(e) => {
                self.chain_reads(&e.value);
                self.expr(&e.slice, EventRole::Read);
            }
            Expr::Starred(e) => self.chain_reads(&e.value),
            _ => {}
        }
    }

    /// Base of a chain not rooted at a name, such as `f().a`.
    fn chain_base_read(&mut self, expr: &Expr) {
        match expr {
            Expr::Attribute(e) => self.chain_base_read(&e.value),
            Expr::Subscript(e) => self.chain_base_read(&e.value),
            Expr::Starred(e) => self.chain_base_read(&e.value),
            other => self.expr(other, EventRole::Read),
        }
    }

    fn reads(&mut self, exprs: &[Expr]) {
        for e in exprs {
            self.expr(e, EventRole::Read);
        }
    }

    fn opt_read(&mut self, expr: Option<&Expr>) {
        if let Some(e) = expr {
            self.expr(e, EventRole::Read);
        }
    }

    fn pattern_reads(&mut self, pattern: &ast::Pattern) {
        struct Reads<'a>(Vec<&'a Expr>);
        impl<'a> Visitor<'a> for Reads<'a> {
            fn visit_expr(&mut self, e: &'a Expr) -> bool {
                self.0.push(e);
                false
            }
        }
        let mut reads = Reads(Vec::new());
        super::walk::walk_pattern(pattern, &mut reads);
        for e in reads.0 {
            self.expr(e, EventRole::Read);
        }
    }

    /// `role` is the role of the reference chain rooted at `expr`; it
    /// propagates through attribute, subscript and starred wrappers and into
    /// the elements of collection literals. Every other subexpression is a
    /// plain read.
    fn expr(&mut self, expr: &Expr, role: EventRole) {
        match expr {
            Expr::Name(n) => match n.ctx {
                ExprContext::Load => self.emit(&n.id, Action::Use, role, n.range),
                ExprContext::Store => self.emit(&n.id, Action::Define, EventRole::Binding, n.range),
                ExprContext::Del => self.emit(&n.id, Action::Delete, EventRole::Deletion, n.range),
            },
            Expr::Attribute(e) => self.expr(&e.value, role),
            Expr::Subscript(e) => {
                self.expr(&e.value, role);
                self.expr(&e.slice, EventRole::Read);
            }
            Expr::Starred(e) => self.expr(&e.value, role),
            Expr::List(e) => e.elts.iter().for_each(|x| self.expr(x, role)),
            Expr::Tuple(e) => e.elts.iter().for_each(|x| self.expr(x, role)),
            Expr::Set(e) => e.elts.iter().for_each(|x| self.expr(x, role)),
            Expr::Dict(e) => {
                for k in e.keys.iter().flatten() {
                    self.expr(k, EventRole::Read);
                }
                e.values.iter().for_each(|x| self.expr(x, role));
            }
            Expr::Call(e) => {
                match &*e.func {
                    Expr::Attribute(m) => self.expr(&m.value, EventRole::MethodBase),
                    other => self.expr(other, EventRole::Read),
                }
                for a in &e.args {
                    self.expr(a, EventRole::CallArgument);
                }
                for k in &e.keywords {
                    self.expr(&k.value, EventRole::CallArgument);
                }
            }
            Expr::NamedExpr(e) => {
                self.expr(&e.value, EventRole::Read);
                for n in target_names(&e.target) {
                    self.emit(&n.id, Action::Define, EventRole::Binding, n.range);
                }
            }
            Expr::Lambda(e) => {
                self.argument_reads(&e.args);
                let mut scope = BTreeSet::new();
                let args = &e.args;
                for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
                    scope.insert(a.def.arg.to_string());
                }
                for a in args.vararg.iter().chain(&args.kwarg) {
                    scope.insert(a.arg.to_string());
                }
                self.locals.push(scope);
                self.expr(&e.body, EventRole::Read);
                self.locals.pop();
            }
            Expr::ListComp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::SetComp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::GeneratorExp(e) => self.comprehension(&e.generators, &[&e.elt]),
            Expr::DictComp(e) => self.comprehension(&e.generators, &[&e.key, &e.value]),
            Expr::BoolOp(e) => self.reads(&e.values),
            Expr::BinOp(e) => {
                self.expr(&e.left, EventRole::Read);
                self.expr(&e.right, EventRole::Read);
            }
            Expr::UnaryOp(e) => self.expr(&e.operand, EventRole::Read),
            Expr::IfExp(e) => {
                self.expr(&e.test, EventRole::Read);
                self.expr(&e.body, EventRole::Read);
                self.expr(&e.orelse, EventRole::Read);
            }
            Expr::Await(e) => self.expr(&e.value, EventRole::Read),
            Expr::Yield(e) => self.opt_read(e.value.as_deref()),
            Expr::YieldFrom(e) => self.expr(&e.value, EventRole::Read),
            Expr::Compare(e) => {
                self.expr(&e.left, EventRole::Read);
                self.reads(&e.comparators);
            }
            Expr::FormattedValue(e) => {
                self.expr(&e.value, EventRole::Read);
                self.opt_read(e.format_spec.as_deref());
            }
            Expr::JoinedStr(e) => self.reads(&e.values),
            Expr::Constant(_) => {}
            Expr::Slice(e) => {
                self.opt_read(e.lower.as_deref());
                self.opt_read(e.upper.as_deref());
                self.opt_read(e.step.as_deref());
            }
        }
    }

    /// The first iterable is evaluated in the enclosing scope; everything
    /// else runs once per element with the targets bound locally.
    fn comprehension(&mut self, generators: &[ast::Comprehension], elts: &[&Expr]) {
        let Some(first) = generators.first() else {
            return;
        };
        self.expr(&first.iter, EventRole::Iterable);
        let id = self.frame_id();
        self.locals.push(BTreeSet::new());
        self.in_frame(Frame::Loop { id }, |c| {
            for (i, g) in generators.iter().enumerate() {
                if i > 0 {
                    c.expr(&g.iter, EventRole::Iterable);
                }
                if let Some(scope) = c.locals.last_mut() {
                    for n in target_names(&g.target) {
                        scope.insert(n.id.to_string());
                    }
                }
                c.reads(&g.ifs);
            }
            for e in elts {
                c.expr(e, EventRole::Read);
            }
        });
        self.locals.pop();
    }
}

#[derive(Default)]
struct BodyScan<'a> {
    bound: BTreeSet<&'a str>,
    loads: Vec<&'a ast::ExprName>,
    globals: Vec<TextRange>,
    global_names: BTreeSet<&'a str>,
}

impl<'a> Visitor<'a> for BodyScan<'a> {
    fn visit_expr(&mut self, expr: &'a Expr) -> bool {
        if let Expr::Name(n) = expr {
            match n.ctx {
                ExprContext::Load => self.loads.push(n),
                _ => {
                    self.bound.insert(n.id.as_str());
                }
            }
        }
        true
    }

    fn visit_binding(&mut self, id: &'a str, _kind: BindingKind, _range: TextRange) {
        self.bound.insert(id);
    }

    fn visit_global(&mut self, names: &'a [ast::Identifier], range: TextRange) {
        self.globals.push(range);
        self.global_names.extend(names.iter().map(|n| n.as_str()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notebook::{screen_cell, CodeCell};
    use crate::syntax::parse_cell;

    fn events_for(cells: &[&str], which: usize) -> (Vec<NameEvent>, Vec<Diagnostic>) {
        let trees: Vec<_> = cells
            .iter()
            .enumerate()
            .map(|(i, src)| parse_cell(&screen_cell(CodeCell::from_text(i + 1, src))).unwrap())
            .collect();
        let symbols = NotebookSymbols::collect(&trees, false);
        let mut diags = Vec::new();
        let events = collect_name_events(&trees[which - 1], &symbols, &mut diags);
        (events, diags)
    }

    fn summary(events: &[NameEvent]) -> Vec<(String, Action, EventRole)> {
        events.iter().map(|e| (e.name.clone(), e.action, e.role)).collect()
    }

    #[test]
    fn assignment_orders_value_before_target() {
        let (ev, _) = events_for(&["a = 1\nb = 2", "x = a + b"], 2);
        assert_eq!(
            summary(&ev),
            vec![
                ("a".into(), Action::Use, EventRole::Read),
                ("b".into(), Action::Use, EventRole::Read),
                ("x".into(), Action::Define, EventRole::Binding),
            ]
        );
        assert!(ev.iter().all(|e| e.conditionality == Conditionality::Unconditional));
    }

    #[test]
    fn method_call_and_arguments_have_roles() {
        let (ev, _) = events_for(
            &["import pandas as pd\ndf = pd.DataFrame()\nk = 1", "df.drop(k, axis=k)"],
            2,
        );
        assert_eq!(
            summary(&ev),
            vec![
                ("df".into(), Action::Use, EventRole::MethodBase),
                ("k".into(), Action::Use, EventRole::CallArgument),
                ("k".into(), Action::Use, EventRole::CallArgument),
            ]
        );
    }

    #[test]
    fn loop_body_is_loop_conditional() {
        let (ev, _) = events_for(
            &[
                "count = 0",
                "for i in range(3):\n    if i == 0:\n        count = 0\n    else:\n        count += 1",
            ],
            2,
        );
        let defs: Vec<_> = ev.iter().filter(|e| e.name == "count").collect();
        assert_eq!(defs.len(), 3);
        assert!(defs.iter().all(|e| e.conditionality == Conditionality::LoopConditional));
        assert_eq!(defs[0].path.len(), 2);
        assert!(matches!(defs[0].path[1], Frame::Branch { arm: 0, arms: 2, .. }));
        assert!(matches!(defs[1].path[1], Frame::Branch { arm: 1, arms: 2, .. }));
        assert_eq!(defs[1].action, Action::Use);
        assert_eq!(defs[2].action, Action::Define);
    }

    #[test]
    fn comprehension_variable_is_local() {
        let (ev, _) = events_for(&["xs = [1]", "ys = [x * 2 for x in xs]"], 2);
        assert_eq!(
            summary(&ev),
            vec![
                ("xs".into(), Action::Use, EventRole::Iterable),
                ("ys".into(), Action::Define, EventRole::Binding),
            ]
        );
    }

    #[test]
    fn function_body_reports_free_variables_and_code_refs() {
        let (ev, diags) = events_for(
            &[
                "path = 'a.csv'\ndef helper():\n    return 1",
                "def load():\n    helper()\n    return open(path)",
            ],
            2,
        );
        assert_eq!(
            summary(&ev),
            vec![
                ("load".into(), Action::Define, EventRole::Declaration),
                ("helper".into(), Action::Use, EventRole::Read),
            ]
        );
        assert!(diags.iter().any(|d| d.code == DiagnosticCode::FunctionFreeVariable));
    }

    #[test]
    fn data_binding_of_code_name_is_reported() {
        let (ev, diags) = events_for(&["add_one = 1", "def add_one(x):\n    return x + 1"], 1);
        assert!(ev.is_empty());
        assert_eq!(diags[0].code, DiagnosticCode::NameReuse);
    }

    #[test]
    fn item_store_reads_and_changes_root() {
        let (ev, _) = events_for(&["d = {}\nk = 1", "d[k] = 2"], 2);
        assert_eq!(
            summary(&ev),
            vec![
                ("k".into(), Action::Use, EventRole::Read),
                ("d".into(), Action::Use, EventRole::Read),
                ("d".into(), Action::MaybeDefine, EventRole::ItemStore),
            ]
        );
    }

    #[test]
    fn global_in_function_is_reported() {
        let (_, diags) = events_for(&["n = 0\ndef bump():\n    global n\n    n += 1"], 1);
        assert!(diags.iter().any(|d| d.code == DiagnosticCode::GlobalInFunction));
    }
}
