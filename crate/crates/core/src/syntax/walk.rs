//! Generic pre-order traversal over the parser's AST. Visitors decide per
//! node whether to descend.

use rustpython_parser::ast::{self, Expr, Pattern, Stmt};
use rustpython_parser::text_size::TextRange;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BindingKind {
    Function,
    Class,
    Param,
    Import,
    Except,
    Capture,
}

pub(crate) trait Visitor<'a> {
    fn visit_stmt(&mut self, _stmt: &'a Stmt) -> bool {
        true
    }
    fn visit_expr(&mut self, _expr: &'a Expr) -> bool {
        true
    }
    fn visit_binding(&mut self, _id: &'a str, _kind: BindingKind, _range: TextRange) {}
    fn visit_global(&mut self, _names: &'a [ast::Identifier], _range: TextRange) {}
}

pub(crate) fn walk_stmts<'a, V: Visitor<'a>>(stmts: &'a [Stmt], v: &mut V) {
    for s in stmts {
        walk_stmt(s, v);
    }
}

/// Name bound by `import a.b.c` or `import a as b`.
pub(crate) fn import_binding(alias: &ast::Alias) -> &str {
    match &alias.asname {
        Some(asname) => asname.as_str(),
        None => alias.name.split('.').next().unwrap_or(""),
    }
}

pub(crate) fn walk_stmt<'a, V: Visitor<'a>>(stmt: &'a Stmt, v: &mut V) {
    if !v.visit_stmt(stmt) {
        return;
    }
    match stmt {
        Stmt::FunctionDef(s) => walk_function(
            &s.name,
            &s.args,
            &s.body,
            &s.decorator_list,
            s.returns.as_deref(),
            s.range,
            v,
        ),
        Stmt::AsyncFunctionDef(s) => walk_function(
            &s.name,
            &s.args,
            &s.body,
            &s.decorator_list,
            s.returns.as_deref(),
            s.range,
            v,
        ),
        Stmt::ClassDef(s) => {
            walk_exprs(&s.decorator_list, v);
            walk_exprs(&s.bases, v);
            for k in &s.keywords {
                walk_expr(&k.value, v);
            }
            v.visit_binding(s.name.as_str(), BindingKind::Class, s.range);
            walk_stmts(&s.body, v);
        }
        Stmt::Return(s) => walk_opt(s.value.as_deref(), v),
        Stmt::Delete(s) => walk_exprs(&s.targets, v),
        Stmt::Assign(s) => {
            walk_expr(&s.value, v);
            walk_exprs(&s.targets, v);
        }
        Stmt::TypeAlias(s) => {
            walk_expr(&s.value, v);
            walk_expr(&s.name, v);
        }
        Stmt::AugAssign(s) => {
            walk_expr(&s.target, v);
            walk_expr(&s.value, v);
        }
        Stmt::AnnAssign(s) => {
            walk_expr(&s.annotation, v);
            walk_opt(s.value.as_deref(), v);
            walk_expr(&s.target, v);
        }
        Stmt::For(s) => {
            walk_expr(&s.iter, v);
            walk_expr(&s.target, v);
            walk_stmts(&s.body, v);
            walk_stmts(&s.orelse, v);
        }
        Stmt::AsyncFor(s) => {
            walk_expr(&s.iter, v);
            walk_expr(&s.target, v);
            walk_stmts(&s.body, v);
            walk_stmts(&s.orelse, v);
        }
        Stmt::While(s) => {
            walk_expr(&s.test, v);
            walk_stmts(&s.body, v);
            walk_stmts(&s.orelse, v);
        }
        Stmt::If(s) => {
            walk_expr(&s.test, v);
            walk_stmts(&s.body, v);
            walk_stmts(&s.orelse, v);
        }
        Stmt::With(s) => {
            walk_with_items(&s.items, v);
            walk_stmts(&s.body, v);
        }
        Stmt::AsyncWith(s) => {
            walk_with_items(&s.items, v);
            walk_stmts(&s.body, v);
        }
        Stmt::Match(s) => {
            walk_expr(&s.subject, v);
            for case in &s.cases {
                walk_pattern(&case.pattern, v);
                walk_opt(case.guard.as_deref(), v);
                walk_stmts(&case.body, v);
            }
        }
        Stmt::Raise(s) => {
            walk_opt(s.exc.as_deref(), v);
            walk_opt(s.cause.as_deref(), v);
        }
        Stmt::Try(s) => walk_try(&s.body, &s.handlers, &s.orelse, &s.finalbody, v),
        Stmt::TryStar(s) => walk_try(&s.body, &s.handlers, &s.orelse, &s.finalbody, v),
        Stmt::Assert(s) => {
            walk_expr(&s.test, v);
            walk_opt(s.msg.as_deref(), v);
        }
        Stmt::Import(s) => {
            for alias in &s.names {
                v.visit_binding(import_binding(alias), BindingKind::Import, alias.range);
            }
        }
        Stmt::ImportFrom(s) => {
            for alias in &s.names {
                if alias.name.as_str() != "*" {
                    v.visit_binding(import_binding(alias), BindingKind::Import, alias.range);
                }
            }
        }
        Stmt::Global(s) => v.visit_global(&s.names, s.range),
        Stmt::Nonlocal(s) => v.visit_global(&s.names, s.range),
        Stmt::Expr(s) => walk_expr(&s.value, v),
        Stmt::Pass(_) | Stmt::Break(_) | Stmt::Continue(_) => {}
    }
}

fn walk_function<'a, V: Visitor<'a>>(
    name: &'a ast::Identifier,
    args: &'a ast::Arguments,
    body: &'a [Stmt],
    decorators: &'a [Expr],
    returns: Option<&'a Expr>,
    range: TextRange,
    v: &mut V,
) {
    walk_exprs(decorators, v);
    walk_arguments(args, v);
    walk_opt(returns, v);
    v.visit_binding(name.as_str(), BindingKind::Function, range);
    walk_stmts(body, v);
}

pub(crate) fn walk_arguments<'a, V: Visitor<'a>>(args: &'a ast::Arguments, v: &mut V) {
    for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
        walk_opt(a.default.as_deref(), v);
        walk_opt(a.def.annotation.as_deref(), v);
        v.visit_binding(a.def.arg.as_str(), BindingKind::Param, a.def.range);
    }
    for a in args.vararg.iter().chain(&args.kwarg) {
        walk_opt(a.annotation.as_deref(), v);
        v.visit_binding(a.arg.as_str(), BindingKind::Param, a.range);
    }
}

fn walk_with_items<'a, V: Visitor<'a>>(items: &'a [ast::WithItem], v: &mut V) {
    for item in items {
        walk_expr(&item.context_expr, v);
        walk_opt(item.optional_vars.as_deref(), v);
    }
}

fn walk_try<'a, V: Visitor<'a>>(
    body: &'a [Stmt],
    handlers: &'a [ast::ExceptHandler],
    orelse: &'a [Stmt],
    finalbody: &'a [Stmt],
    v: &mut V,
) {
    walk_stmts(body, v);
    for ast::ExceptHandler::ExceptHandler(h) in handlers {
        walk_opt(h.type_.as_deref(), v);
        if let Some(name) = &h.name {
            v.visit_binding(name.as_str(), BindingKind::Except, h.range);
        }
        walk_stmts(&h.body, v);
    }
    walk_stmts(orelse, v);
    walk_stmts(finalbody, v);
}

pub(crate) fn walk_pattern<'a, V: Visitor<'a>>(pattern: &'a Pattern, v: &mut V) {
    match pattern {
        Pattern::MatchValue(p) => walk_expr(&p.value, v),
        Pattern::MatchSingleton(_) => {}
        Pattern::MatchSequence(p) => p.patterns.iter().for_each(|p| walk_pattern(p, v)),
        Pattern::MatchMapping(p) => {
            walk_exprs(&p.keys, v);
            p.patterns.iter().for_each(|p| walk_pattern(p, v));
            if let Some(rest) = &p.rest {
                v.visit_binding(rest.as_str(), BindingKind::Capture, p.range);
            }
        }
        Pattern::MatchClass(p) => {
            walk_expr(&p.cls, v);
            p.patterns.iter().for_each(|p| walk_pattern(p, v));
            p.kwd_patterns.iter().for_each(|p| walk_pattern(p, v));
        }
        Pattern::MatchStar(p) => {
            if let Some(name) = &p.name {
                v.visit_binding(name.as_str(), BindingKind::Capture, p.range);
            }
        }
        Pattern::MatchAs(p) => {
            if let Some(inner) = &p.pattern {
                walk_pattern(inner, v);
            }
            if let Some(name) = &p.name {
                v.visit_binding(name.as_str(), BindingKind::Capture, p.range);
            }
        }
        Pattern::MatchOr(p) => p.patterns.iter().for_each(|p| walk_pattern(p, v)),
    }
}

fn walk_opt<'a, V: Visitor<'a>>(expr: Option<&'a Expr>, v: &mut V) {
    if let Some(e) = expr {
        walk_expr(e, v);
    }
}

fn walk_exprs<'a, V: Visitor<'a>>(exprs: &'a [Expr], v: &mut V) {
    for e in exprs {
        walk_expr(e, v);
    }
}

fn walk_comprehensions<'a, V: Visitor<'a>>(generators: &'a [ast::Comprehension], v: &mut V) {
    for g in generators {
        walk_expr(&g.iter, v);
        walk_expr(&g.target, v);
        walk_exprs(&g.ifs, v);
    }
}

pub(crate) fn walk_expr<'a, V: Visitor<'a>>(expr: &'a Expr, v: &mut V) {
    if !v.visit_expr(expr) {
        return;
    }
    match expr {
        Expr::BoolOp(e) => walk_exprs(&e.values, v),
        Expr::NamedExpr(e) => {
            walk_expr(&e.value, v);
            walk_expr(&e.target, v);
        }
        Expr::BinOp(e) => {
            walk_expr(&e.left, v);
            walk_expr(&e.right, v);
        }
        Expr::UnaryOp(e) => walk_expr(&e.operand, v),
        Expr::Lambda(e) => {
            walk_arguments(&e.args, v);
            walk_expr(&e.body, v);
        }
        Expr::IfExp(e) => {
            walk_expr(&e.test, v);
            walk_expr(&e.body, v);
            walk_expr(&e.orelse, v);
        }
        Expr::Dict(e) => {
            for k in e.keys.iter().flatten() {
                walk_expr(k, v);
            }
            walk_exprs(&e.values, v);
        }
        Expr::Set(e) => walk_exprs(&e.elts, v),
        Expr::ListComp(e) => {
            walk_comprehensions(&e.generators, v);
            walk_expr(&e.elt, v);
        }
        Expr::SetComp(e) => {
            walk_comprehensions(&e.generators, v);
            walk_expr(&e.elt, v);
        }
        Expr::GeneratorExp(e) => {
            walk_comprehensions(&e.generators, v);
            walk_expr(&e.elt, v);
        }
        Expr::DictComp(e) => {
            walk_comprehensions(&e.generators, v);
            walk_expr(&e.key, v);
            walk_expr(&e.value, v);
        }
        Expr::Await(e) => walk_expr(&e.value, v),
        Expr::Yield(e) => walk_opt(e.value.as_deref(), v),
        Expr::YieldFrom(e) => walk_expr(&e.value, v),
        Expr::Compare(e) => {
            walk_expr(&e.left, v);
            walk_exprs(&e.comparators, v);
        }
        Expr::Call(e) => {
            walk_expr(&e.func, v);
            walk_exprs(&e.args, v);
            for k in &e.keywords {
                walk_expr(&k.value, v);
            }
        }
        Expr::FormattedValue(e) => {
            walk_expr(&e.value, v);
            walk_opt(e.format_spec.as_deref(), v);
        }
        Expr::JoinedStr(e) => walk_exprs(&e.values, v),
        Expr::Constant(_) => {}
        Expr::Attribute(e) => walk_expr(&e.value, v),
        Expr::Subscript(e) => {
            walk_expr(&e.value, v);
            walk_expr(&e.slice, v);
        }
        Expr::Starred(e) => walk_expr(&e.value, v),
        Expr::Name(_) => {}
        Expr::List(e) => walk_exprs(&e.elts, v),
        Expr::Tuple(e) => walk_exprs(&e.elts, v),
        Expr::Slice(e) => {
            walk_opt(e.lower.as_deref(), v);
            walk_opt(e.upper.as_deref(), v);
            walk_opt(e.step.as_deref(), v);
        }
    }
}

/// Root identifier of a reference chain such as `a.b[c].d` or `*a`.
pub(crate) fn chain_root(expr: &Expr) -> Option<&ast::ExprName> {
    match expr {
        Expr::Name(n) => Some(n),
        Expr::Attribute(e) => chain_root(&e.value),
        Expr::Subscript(e) => chain_root(&e.value),
        Expr::Starred(e) => chain_root(&e.value),
        _ => None,
    }
}

/// Names bound by an assignment target (`a`, `a, (b, *c)`); attribute and
/// subscript targets bind nothing.
pub(crate) fn target_names(target: &Expr) -> Vec<&ast::ExprName> {
    let mut out = Vec::new();
    fn go<'a>(e: &'a Expr, out: &mut Vec<&'a ast::ExprName>) {
        match e {
            Expr::Name(n) => out.push(n),
            Expr::Tuple(t) => t.elts.iter().for_each(|e| go(e, out)),
            Expr::List(t) => t.elts.iter().for_each(|e| go(e, out)),
            Expr::Starred(s) => go(&s.value, out),
            _ => {}
        }
    }
    go(target, &mut out);
    out
}

/// Name captures introduced by a match pattern.
pub(crate) fn pattern_captures(pattern: &Pattern) -> Vec<(&str, TextRange)> {
    struct Captures<'a>(Vec<(&'a str, TextRange)>);
    impl<'a> Visitor<'a> for Captures<'a> {
        fn visit_expr(&mut self, _: &'a Expr) -> bool {
            false
        }
        fn visit_binding(&mut self, id: &'a str, kind: BindingKind, range: TextRange) {
            if kind == BindingKind::Capture {
                self.0.push((id, range));
            }
        }
    }
    let mut c = Captures(Vec::new());
    walk_pattern(pattern, &mut c);
    c.0
}
