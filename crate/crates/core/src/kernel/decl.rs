//! Declarations and modules.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::conv::Checker;
use super::elab::*;
use super::quote::{quote_cube_sort, quote_tope};
use super::syntax::*;
use super::value::instantiate_tope;
use crate::diagnostic::{Code, Diagnostic};
use crate::surface::ast::{Binder, DeclKind, Declaration, Expr, ExprKind, Pattern, SourceModule, TeleEntry};
use crate::tope::{Cube, Tope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    pub declarations_checked: usize,
    pub solver_queries: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub module: String,
    pub status: Status,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: CheckStats,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

/// A checked module as seen by its importers.
#[derive(Debug, Clone, Default)]
pub struct CheckedModule {
    pub name: String,
    pub ok: bool,
    /// Every global visible in the module, imported or its own.
    pub exports: Globals,
    /// Declarations of this module in order.
    pub declared: Vec<String>,
    /// Postulates declared by this module.
    pub postulates: BTreeSet<String>,
    /// Postulates declared by this module or any module it imports.
    pub axioms: BTreeSet<String>,
}

struct SectionVar {
    name: String,
    ty: Expr,
}

/// Where the checker looks up imported modules.
pub trait ImportEnv {
    fn module(&self, name: &str) -> Option<Arc<CheckedModule>>;
}

impl<F: Fn(&str) -> Option<Arc<CheckedModule>>> ImportEnv for F {
    fn module(&self, name: &str) -> Option<Arc<CheckedModule>> {
        self(name)
    }
}

pub fn check_module(m: &SourceModule, env: &dyn ImportEnv, ck: &Checker) -> (CheckReport, CheckedModule) {
    let start = Instant::now();
    let queries = ck.solver.queries();
    let mut diagnostics = Vec::new();
    let mut checked = CheckedModule {
        name: m.name.clone(),
        ..CheckedModule::default()
    };
    for import in &m.imports {
        match env.module(&import.name) {
            None => diagnostics.push(Diagnostic::error(
                Code::Import,
                import.span,
                format!("module `{}` was not found", import.name),
            )),
            Some(dep) if !dep.ok => diagnostics.push(Diagnostic::error(
                Code::Import,
                import.span,
                format!("imported module `{}` failed to check", import.name),
            )),
            Some(dep) => {
                for (n, item) in &dep.exports {
                    match checked.exports.get(n) {
                        Some(existing) if !existing.same(item) => diagnostics.push(Diagnostic::error(
                            Code::Import,
                            import.span,
                            format!(
                                "`{n}` is defined both in `{}` and in `{}`",
                                existing.module(),
                                item.module()
                            ),
                        )),
                        Some(_) => {}
                        None => {
                            checked.exports.insert(n.clone(), item.clone());
                        }
                    }
                }
                checked.axioms.extend(dep.axioms.iter().cloned());
            }
        }
    }
    let mut stats = CheckStats::default();
    if diagnostics.is_empty() {
        let mut sections: Vec<SectionVar> = Vec::new();
        let mut rejected = HashSet::new();
        let module_name = name(&m.name);
        for d in &m.declarations {
            stats.declarations_checked += 1;
            let clash = checked.exports.get(&d.name).map(|g| g.module().to_owned()).or_else(|| {
                sections
                    .iter()
                    .any(|s| s.name == d.name)
                    .then(|| "this module's section variables".to_owned())
            });
            if let Some(owner) = clash {
                let owner = if owner == m.name { "this module".to_owned() } else { format!("`{owner}`") };
                diagnostics.push(Diagnostic::error(
                    Code::Check,
                    d.name_span,
                    format!("`{}` is already defined in {owner}", d.name),
                ));
                continue;
            }
            let result = {
                let elab = Elab {
                    ck,
                    globals: &checked.exports,
                    spans: &m.span_table,
                    current: Some(&d.name),
                    rejected: Some(&rejected),
                };
                check_declaration(&elab, d, &sections, &module_name)
            };
            let tope_error = ck.take_tope_error();
            match result {
                Ok(Some(item)) => {
                    if d.kind == DeclKind::Postulate {
                        checked.postulates.insert(d.name.clone());
                        checked.axioms.insert(d.name.clone());
                    }
                    checked.declared.push(d.name.clone());
                    checked.exports.insert(d.name.clone(), item);
                }
                Ok(None) => sections.push(SectionVar {
                    name: d.name.clone(),
                    ty: d.stated_type.clone(),
                }),
                Err(mut diag) => {
                    if let (Some(te), Code::Check) = (tope_error, diag.code) {
                        let note = diag.message.clone();
                        diag.code = te.code();
                        diag.message = te.to_string();
                        diag.notes.insert(0, (diag.primary_span, note));
                    }
                    diag.message = format!("in `{}`: {}", d.name, diag.message);
                    diagnostics.push(diag);
                    rejected.insert(d.name.clone());
                }
            }
        }
    }
    let ok = !diagnostics.iter().any(|d| d.is_error());
    checked.ok = ok;
    stats.solver_queries = ck.solver.queries() - queries;
    stats.wall_time = start.elapsed();
    let report = CheckReport {
        module: m.name.clone(),
        status: if ok { Status::Ok } else { Status::Failed },
        diagnostics,
        stats,
    };
    (report, checked)
}

fn is_tope_decl(d: &Declaration) -> bool {
    match &d.stated_type.kind {
        ExprKind::TopeKw => true,
        ExprKind::Arrow(_, b) => matches!(b.kind, ExprKind::TopeKw),
        _ => false,
    }
}

/// Check one declaration. Section variables yield `None`.
pub fn check_declaration(
    elab: &Elab,
    d: &Declaration,
    sections: &[impl SectionLike],
    module: &Name,
) -> Result<Option<GlobalItem>, Diagnostic> {
    let mut tele: Vec<TeleEntry> = Vec::new();
    let own: Vec<&Expr> = std::iter::once(&d.stated_type)
        .chain(d.body.as_ref())
        .collect();
    for (n, ty) in needed_sections(sections, &d.telescope, &own) {
        tele.push(TeleEntry::Binder(Binder {
            patterns: vec![Pattern::Var(n)],
            ty,
        }));
    }
    tele.extend(d.telescope.iter().cloned());
    if d.kind == DeclKind::SectionVariable {
        tele.push(TeleEntry::Binder(Binder {
            patterns: vec![Pattern::Var(d.name.clone())],
            ty: d.stated_type.clone(),
        }));
        telescope(elab, &tele)?;
        return Ok(None);
    }
    if is_tope_decl(d) {
        return tope_macro(elab, d, &tele, module).map(Some);
    }
    let tel = telescope(elab, &tele)?;
    let (ty, _) = elab.check_type(&tel.cx, &d.stated_type)?;
    let mut value = match &d.body {
        Some(body) => {
            let tv = elab.eval(&tel.cx, &ty);
            Some(elab.check(&tel.cx, body, &tv)?)
        }
        None => None,
    };
    let mut ty = ty;
    for b in tel.binders.iter().rev() {
        match b {
            TeleBinder::Term { name, ty: a } => {
                ty = Arc::new(Term::Pi(name.clone(), a.clone(), ty));
                value = value.map(|v| Arc::new(Term::Lam(name.clone(), v)));
            }
            TeleBinder::Cube {
                name,
                cube,
                shape,
                depth,
                ..
            } => {
                ty = Arc::new(Term::Ext(Box::new(ExtTerm {
                    name: name.clone(),
                    cube: cube.clone(),
                    shape: quote_tope(*depth, shape),
                    family: ty,
                    subtope: Tope::Bot,
                    partial: Arc::new(Term::RecBot),
                })));
                value = value.map(|v| Arc::new(Term::CubeLam(name.clone(), v)));
            }
        }
    }
    let kind = match d.kind {
        DeclKind::Postulate => GlobalKind::Postulate,
        _ => GlobalKind::Definition,
    };
    Ok(Some(GlobalItem::Def(Arc::new(GlobalDef::new(
        name(&d.name),
        module.clone(),
        kind,
        tel.schema,
        ty,
        value,
    )))))
}

/// Anything that can stand for a section variable.
pub trait SectionLike {
    fn section_name(&self) -> &str;
    fn section_type(&self) -> &Expr;
}

impl SectionLike for SectionVar {
    fn section_name(&self) -> &str {
        &self.name
    }
    fn section_type(&self) -> &Expr {
        &self.ty
    }
}

/// Section variables mentioned by a declaration, closed under the
/// variables their types mention, in declaration order.
fn needed_sections(sections: &[impl SectionLike], tele: &[TeleEntry], rest: &[&Expr]) -> Vec<(String, Expr)> {
    let mut free = BTreeSet::new();
    let mut bound: Vec<String> = Vec::new();
    for entry in tele {
        match entry {
            TeleEntry::Binder(b) => {
                free_names(&b.ty, &mut bound, &mut free);
                for p in &b.patterns {
                    bound.extend(p.names().into_iter().map(str::to_owned));
                }
            }
            TeleEntry::Constraint(e) => free_names(e, &mut bound, &mut free),
        }
    }
    for e in rest {
        free_names(e, &mut bound, &mut free);
    }
    let mut needed = vec![false; sections.len()];
    for i in (0..sections.len()).rev() {
        let s = &sections[i];
        let later_shadow = sections[i + 1..].iter().any(|t| t.section_name() == s.section_name());
        if !later_shadow && free.contains(s.section_name()) {
            needed[i] = true;
            let mut inner = BTreeSet::new();
            free_names(s.section_type(), &mut Vec::new(), &mut inner);
            free.extend(inner);
        }
    }
    sections
        .iter()
        .zip(needed)
        .filter(|(_, n)| *n)
        .map(|(s, _)| (s.section_name().to_owned(), s.section_type().clone()))
        .collect()
}

/// Collect names occurring free in `e`.
pub fn free_names(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mark = bound.len();
    match &e.kind {
        ExprKind::Var(n) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(n.clone());
            }
        }
        ExprKind::Lambda(bs, body) => {
            for b in bs {
                if let Some(t) = &b.ty {
                    free_names(t, bound, out);
                }
                bound.extend(b.pattern.names().into_iter().map(str::to_owned));
            }
            free_names(body, bound, out);
        }
        ExprKind::Pi(bs, body) | ExprKind::Sigma(bs, body) => {
            for b in bs {
                free_names(&b.ty, bound, out);
                for p in &b.patterns {
                    bound.extend(p.names().into_iter().map(str::to_owned));
                }
            }
            free_names(body, bound, out);
        }
        ExprKind::Extension {
            binder,
            family,
            subtope,
            partial,
        } => {
            free_names(&binder.ty, bound, out);
            for p in &binder.patterns {
                bound.extend(p.names().into_iter().map(str::to_owned));
            }
            free_names(family, bound, out);
            free_names(subtope, bound, out);
            free_names(partial, bound, out);
        }
        ExprKind::Shape { pattern, cube, tope } => {
            free_names(cube, bound, out);
            bound.extend(pattern.names().into_iter().map(str::to_owned));
            free_names(tope, bound, out);
        }
        ExprKind::Arrow(a, b)
        | ExprKind::Product(a, b)
        | ExprKind::App(a, b)
        | ExprKind::Pair(a, b)
        | ExprKind::TopeEq(a, b)
        | ExprKind::Leq(a, b)
        | ExprKind::And(a, b)
        | ExprKind::Or(a, b)
        | ExprKind::Ann(a, b) => {
            free_names(a, bound, out);
            free_names(b, bound, out);
        }
        ExprKind::Fst(a) | ExprKind::Snd(a) => free_names(a, bound, out),
        ExprKind::PathType(t, a, b) => {
            if let Some(t) = t {
                free_names(t, bound, out);
            }
            free_names(a, bound, out);
            free_names(b, bound, out);
        }
        ExprKind::Refl(a) => {
            if let Some(a) = a {
                free_names(a, bound, out);
            }
        }
        ExprKind::J(a, b, c) => {
            free_names(a, bound, out);
            free_names(b, bound, out);
            free_names(c, bound, out);
        }
        ExprKind::RecOr(bs) => {
            for (t, b) in bs {
                free_names(t, bound, out);
                free_names(b, bound, out);
            }
        }
        ExprKind::Universe(_)
        | ExprKind::Interval
        | ExprKind::CubeKw
        | ExprKind::TopeKw
        | ExprKind::UnitCube
        | ExprKind::Star
        | ExprKind::Zero
        | ExprKind::One
        | ExprKind::Top
        | ExprKind::Bot
        | ExprKind::RecBot => {}
    }
    bound.truncate(mark);
}

enum TeleBinder {
    Term {
        name: Name,
        ty: RTerm,
    },
    Cube {
        name: Name,
        cube: Cube,
        /// Level-based shape over [`CubeTerm::Arg`].
        shape: Tope,
        depth: usize,
        level: usize,
    },
}

struct Telescope {
    cx: Cx,
    schema: Vec<SchemaParam>,
    binders: Vec<TeleBinder>,
}

fn telescope(elab: &Elab, tele: &[TeleEntry]) -> Result<Telescope, Diagnostic> {
    let mut cx = Cx::new();
    let mut schema = Vec::new();
    let mut binders: Vec<TeleBinder> = Vec::new();
    let mut last_is_cube = false;
    for entry in tele {
        match entry {
            TeleEntry::Binder(b) => {
                for p in &b.patterns {
                    let depth = cx.depth();
                    let prenex = binders.is_empty();
                    last_is_cube = false;
                    match elab.domain(&cx, &b.ty)? {
                        Domain::Sort | Domain::Family(..) if !prenex => {
                            return Err(Diagnostic::error(
                                Code::Check,
                                elab.span(&b.ty),
                                "cube sort and tope family parameters must come before all other parameters",
                            ))
                        }
                        Domain::Sort => {
                            let n = plain_name(elab, p, &b.ty)?;
                            cx = cx.bind_sort(&n);
                            schema.push(SchemaParam {
                                name: name(&n),
                                kind: SchemaParamKind::Sort,
                            });
                        }
                        Domain::Family(c, bound) => {
                            let n = plain_name(elab, p, &b.ty)?;
                            schema.push(SchemaParam {
                                name: name(&n),
                                kind: SchemaParamKind::Family {
                                    domain: quote_cube_sort(depth, &c),
                                    bound: bound.as_ref().map(|t| quote_tope(depth, t)),
                                },
                            });
                            cx = cx.bind_family(&n, c, bound);
                        }
                        Domain::Cube(c, shape) => {
                            let (inner, r) = cx
                                .bind_cube(p, c.clone())
                                .map_err(|m| Diagnostic::error(Code::Sort, elab.span(&b.ty), m))?;
                            cx = inner.assume(&instantiate_tope(&shape, &r));
                            binders.push(TeleBinder::Cube {
                                name: name(&p.binder_name()),
                                cube: quote_cube_sort(depth, &c),
                                shape,
                                depth,
                                level: depth,
                            });
                            last_is_cube = true;
                        }
                        Domain::Type(t, v) => {
                            let (inner, _) = cx
                                .bind_term(p, v, elab.ck)
                                .map_err(|m| Diagnostic::error(Code::Check, elab.span(&b.ty), m))?;
                            cx = inner;
                            binders.push(TeleBinder::Term {
                                name: name(&p.binder_name()),
                                ty: t,
                            });
                        }
                    }
                }
            }
            TeleEntry::Constraint(e) => {
                let t = elab.tope(&cx, e)?;
                match binders.last_mut() {
                    Some(TeleBinder::Cube { shape, level, .. }) if last_is_cube => {
                        *shape = Tope::and(shape.clone(), abstract_tope(&t, *level));
                    }
                    _ => {
                        return Err(Diagnostic::error(
                            Code::Check,
                            elab.span(e),
                            "a tope constraint must directly follow a cube parameter",
                        ))
                    }
                }
                cx = cx.assume(&t);
            }
        }
    }
    Ok(Telescope { cx, schema, binders })
}

fn plain_name(elab: &Elab, p: &Pattern, at: &Expr) -> Result<String, Diagnostic> {
    match p {
        Pattern::Var(n) => Ok(n.clone()),
        _ => Err(Diagnostic::error(
            Code::Check,
            elab.span(at),
            "cube sort and tope family parameters need plain names",
        )),
    }
}

/// `def Δ² (t s : I) : TOPE := s ≤ t` or `def Δ² : I × I → TOPE := λ (t, s) . s ≤ t`.
fn tope_macro(elab: &Elab, d: &Declaration, tele: &[TeleEntry], module: &Name) -> Result<GlobalItem, Diagnostic> {
    let cx = Cx::new();
    let mut params: Vec<(Pattern, Cube)> = Vec::new();
    for entry in tele {
        match entry {
            TeleEntry::Binder(b) => {
                let c = elab.cube_sort(&cx, &b.ty)?;
                for p in &b.patterns {
                    params.push((p.clone(), c.clone()));
                }
            }
            TeleEntry::Constraint(e) => {
                return Err(Diagnostic::error(
                    Code::Check,
                    elab.span(e),
                    "a tope definition takes cube parameters only",
                ))
            }
        }
    }
    let body = d.body.as_ref().expect("definitions have bodies");
    let mut body_expr = body;
    if let ExprKind::Arrow(dom, _) = &d.stated_type.kind {
        let c = elab.cube_sort(&cx, dom)?;
        match &body.kind {
            ExprKind::Lambda(bs, inner) if bs.len() == 1 => {
                params.push((bs[0].pattern.clone(), c));
                body_expr = inner;
            }
            _ => {
                let Some(s) = elab.shape(&cx, body) else {
                    return Err(Diagnostic::error(
                        Code::Sort,
                        elab.span(body),
                        "a tope family is defined by `λ p . φ` or by another tope family",
                    ));
                };
                let (domain, t) = s?;
                if domain != c {
                    return Err(Diagnostic::error(Code::Sort, elab.span(body), "tope family domain mismatch"));
                }
                return Ok(GlobalItem::Macro(Arc::new(TopeMacro {
                    name: name(&d.name),
                    module: module.clone(),
                    domain,
                    body: t,
                })));
            }
        }
    }
    let Some((first, rest)) = params.split_last() else {
        return Err(Diagnostic::error(
            Code::Sort,
            d.name_span,
            "a tope definition needs at least one cube parameter",
        ));
    };
    let (mut pattern, mut domain) = first.clone();
    for (p, c) in rest.iter().rev() {
        pattern = Pattern::Pair(Box::new(p.clone()), Box::new(pattern));
        domain = Cube::product(c.clone(), domain);
    }
    let (inner, _) = cx
        .bind_cube(&pattern, domain.clone())
        .map_err(|m| Diagnostic::error(Code::Sort, d.span, m))?;
    let t = elab.tope(&inner, body_expr)?;
    Ok(GlobalItem::Macro(Arc::new(TopeMacro {
        name: name(&d.name),
        module: module.clone(),
        domain,
        body: abstract_tope(&t, 0),
    })))
}
