//! Bidirectional elaboration of surface expressions into core terms.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use super::conv::Checker;
use super::ctx::{Ctx, EntryKind};
use super::pretty::show_term;
use super::quote::{quote, quote_cube, quote_cube_sort, quote_tope};
use super::syntax::*;
use super::value::*;
use crate::diagnostic::{Code, Diagnostic, Span};
use crate::surface::ast::{Binder, Expr, ExprKind, LamBinder, Pattern};
use crate::tope::{Cube, CubeTerm, Tope};

pub type R<T> = Result<T, Diagnostic>;

/// A tope family defined at top level, e.g. a simplex.
#[derive(Debug)]
pub struct TopeMacro {
    pub name: Name,
    pub module: Name,
    pub domain: Cube,
    /// A closed tope over [`CubeTerm::Arg`].
    pub body: Tope,
}

#[derive(Debug, Clone)]
pub enum GlobalItem {
    Def(Arc<GlobalDef>),
    Macro(Arc<TopeMacro>),
}

impl GlobalItem {
    pub fn module(&self) -> &str {
        match self {
            GlobalItem::Def(d) => &d.module,
            GlobalItem::Macro(m) => &m.module,
        }
    }

    pub fn same(&self, other: &GlobalItem) -> bool {
        match (self, other) {
            (GlobalItem::Def(a), GlobalItem::Def(b)) => Arc::ptr_eq(a, b),
            (GlobalItem::Macro(a), GlobalItem::Macro(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

pub type Globals = HashMap<String, GlobalItem>;

#[derive(Debug, Clone)]
enum ScopeItem {
    Local(usize),
    CubeAlias(CubeTerm, Cube),
    TermAlias(RVal, RVal),
}

/// A typing context together with the names in scope.
#[derive(Debug, Clone, Default)]
pub struct Cx {
    pub ctx: Ctx,
    scope: Vec<(Rc<str>, ScopeItem)>,
}

impl Cx {
    pub fn new() -> Cx {
        Cx::default()
    }

    fn lookup(&self, n: &str) -> Option<&ScopeItem> {
        self.scope.iter().rev().find(|(m, _)| &**m == n).map(|(_, i)| i)
    }

    fn with(&self, ctx: Ctx) -> Cx {
        Cx {
            ctx,
            scope: self.scope.clone(),
        }
    }

    fn name(&mut self, n: &str, item: ScopeItem) {
        self.scope.push((Rc::from(n), item));
    }

    pub fn depth(&self) -> usize {
        self.ctx.depth()
    }

    pub fn assume(&self, t: &Tope) -> Cx {
        self.with(self.ctx.assume(t))
    }

    pub fn bind_sort(&self, n: &str) -> Cx {
        let (ctx, _) = self.ctx.bind_sort(name(n));
        let mut cx = self.with(ctx);
        cx.name(n, ScopeItem::Local(self.depth()));
        cx
    }

    pub fn bind_family(&self, n: &str, domain: Cube, bound: Option<Tope>) -> Cx {
        let (ctx, _) = self.ctx.bind_family(name(n), domain, bound);
        let mut cx = self.with(ctx);
        cx.name(n, ScopeItem::Local(self.depth()));
        cx
    }

    /// Bind a cube variable, naming the components of a tuple pattern.
    pub fn bind_cube(&self, p: &Pattern, cube: Cube) -> Result<(Cx, CubeTerm), String> {
        let (ctx, r) = self.ctx.bind_cube(name(&p.binder_name()), cube.clone());
        let mut cx = self.with(ctx);
        cx.alias_cube(p, r.clone(), cube)?;
        Ok((cx, r))
    }

    fn alias_cube(&mut self, p: &Pattern, r: CubeTerm, cube: Cube) -> Result<(), String> {
        match p {
            Pattern::Wildcard => Ok(()),
            Pattern::Var(n) => {
                self.name(n, ScopeItem::CubeAlias(r, cube));
                Ok(())
            }
            Pattern::Pair(a, b) => match cube {
                Cube::Product(l, rr) => {
                    self.alias_cube(a, cube_fst(r.clone()), *l)?;
                    self.alias_cube(b, cube_snd(r), *rr)
                }
                _ => Err(format!("a tuple pattern needs a product cube, found {cube:?}")),
            },
        }
    }

    /// Bind a typed variable, naming the components of a tuple pattern.
    pub fn bind_term(&self, p: &Pattern, ty: RVal, ck: &Checker) -> Result<(Cx, RVal), String> {
        let (ctx, v) = self.ctx.bind_term(name(&p.binder_name()), ty.clone());
        let mut cx = self.with(ctx);
        match p {
            Pattern::Var(n) => cx.name(n, ScopeItem::Local(self.depth())),
            _ => cx.alias_term(p, v.clone(), ty, ck)?,
        }
        Ok((cx, v))
    }

    fn alias_term(&mut self, p: &Pattern, v: RVal, ty: RVal, ck: &Checker) -> Result<(), String> {
        match p {
            Pattern::Wildcard => Ok(()),
            Pattern::Var(n) => {
                self.name(n, ScopeItem::TermAlias(v, ty));
                Ok(())
            }
            Pattern::Pair(a, b) => match &*ck.force(&self.ctx, &ty) {
                Val::Sigma(_, fa, fb) => {
                    let first = fst(&v);
                    let second_ty = fb.apply_val(first.clone());
                    self.alias_term(a, first, fa.clone(), ck)?;
                    self.alias_term(b, snd(&v), second_ty, ck)
                }
                _ => Err("a tuple pattern needs a Σ-type".to_owned()),
            },
        }
    }
}

/// Replace the cube variable at `level` by [`CubeTerm::Arg`].
pub fn abstract_tope(t: &Tope, level: usize) -> Tope {
    fn term(c: &CubeTerm, level: usize) -> CubeTerm {
        use CubeTerm as C;
        match c {
            C::Var(l) if *l == level => C::Arg,
            C::Var(_) | C::Arg | C::Zero | C::One | C::Star => c.clone(),
            C::Meet(a, b) => C::meet(term(a, level), term(b, level)),
            C::Join(a, b) => C::join(term(a, level), term(b, level)),
            C::Pair(a, b) => C::pair(term(a, level), term(b, level)),
            C::Fst(a) => C::fst(term(a, level)),
            C::Snd(a) => C::snd(term(a, level)),
        }
    }
    match t {
        Tope::Top | Tope::Bot => t.clone(),
        Tope::Eq(a, b) => Tope::Eq(term(a, level), term(b, level)),
        Tope::Leq(a, b) => Tope::Leq(term(a, level), term(b, level)),
        Tope::And(a, b) => Tope::And(Box::new(abstract_tope(a, level)), Box::new(abstract_tope(b, level))),
        Tope::Or(a, b) => Tope::Or(Box::new(abstract_tope(a, level)), Box::new(abstract_tope(b, level))),
        Tope::Pred(p, r) => Tope::Pred(*p, term(r, level)),
    }
}

/// What a binder's domain denotes.
pub enum Domain {
    /// A cube with a shape tope over [`CubeTerm::Arg`].
    Cube(Cube, Tope),
    Sort,
    Family(Cube, Option<Tope>),
    Type(RTerm, RVal),
}

pub struct Elab<'a> {
    pub ck: &'a Checker,
    pub globals: &'a Globals,
    pub spans: &'a [Span],
    /// The declaration being checked, which may not mention itself.
    pub current: Option<&'a str>,
    /// Names of rejected declarations, for better messages.
    pub rejected: Option<&'a std::collections::HashSet<String>>,
}

fn flatten_app(e: &Expr) -> (&Expr, Vec<&Expr>) {
    let mut args = Vec::new();
    let mut head = e;
    while let ExprKind::App(f, a) = &head.kind {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

fn describe(e: &Expr) -> String {
    let s = crate::surface::print_expr(e);
    if s.chars().count() > 60 {
        let cut: String = s.chars().take(57).collect();
        format!("`{cut}...`")
    } else {
        format!("`{s}`")
    }
}

impl Elab<'_> {
    pub fn span(&self, e: &Expr) -> Span {
        self.spans.get(e.id as usize).copied().unwrap_or_default()
    }

    fn err<T>(&self, code: Code, e: &Expr, msg: impl Into<String>) -> R<T> {
        Err(Diagnostic::error(code, self.span(e), msg))
    }

    pub fn show(&self, cx: &Cx, v: &RVal) -> String {
        show_term(&cx.ctx.names(), &quote(cx.depth(), v))
    }

    pub fn eval(&self, cx: &Cx, t: &Term) -> RVal {
        eval(&cx.ctx.env, t)
    }

    fn global(&self, n: &str) -> Option<&GlobalItem> {
        self.globals.get(n)
    }

    fn unbound<T>(&self, e: &Expr, n: &str) -> R<T> {
        if self.current == Some(n) {
            return self.err(Code::Check, e, format!("definition `{n}` refers to itself; recursion is not supported"));
        }
        if self.rejected.is_some_and(|r| r.contains(n)) {
            return self.err(Code::Check, e, format!("`{n}` was rejected earlier in this module"));
        }
        self.err(Code::Infer, e, format!("unbound name `{n}`"))
    }

    // ----- cubes and topes -------------------------------------------------

    pub fn is_cube_sort(&self, cx: &Cx, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Interval | ExprKind::UnitCube => true,
            ExprKind::Product(a, b) => self.is_cube_sort(cx, a) && self.is_cube_sort(cx, b),
            ExprKind::Var(n) => matches!(
                cx.lookup(n),
                Some(ScopeItem::Local(l)) if matches!(cx.ctx.entries[*l].kind, EntryKind::Sort)
            ),
            _ => false,
        }
    }

    pub fn cube_sort(&self, cx: &Cx, e: &Expr) -> R<Cube> {
        match &e.kind {
            ExprKind::Interval => Ok(Cube::Interval),
            ExprKind::UnitCube => Ok(Cube::Unit),
            ExprKind::Product(a, b) => Ok(Cube::product(self.cube_sort(cx, a)?, self.cube_sort(cx, b)?)),
            ExprKind::Var(n) => match cx.lookup(n) {
                Some(ScopeItem::Local(l)) if matches!(cx.ctx.entries[*l].kind, EntryKind::Sort) => {
                    Ok(Cube::Abstract(*l))
                }
                _ => self.err(Code::Sort, e, format!("`{n}` is not a cube")),
            },
            _ => self.err(Code::Sort, e, format!("expected a cube, found {}", describe(e))),
        }
    }

    pub fn cube_term(&self, cx: &Cx, e: &Expr, expected: Option<&Cube>) -> R<(CubeTerm, Cube)> {
        let (t, sort) = self.cube_term_infer(cx, e, expected)?;
        if let Some(want) = expected {
            if *want != sort {
                return self.err(
                    Code::Sort,
                    e,
                    format!(
                        "cube term {} has cube {}, expected {}",
                        describe(e),
                        self.show_cube(cx, &sort),
                        self.show_cube(cx, want)
                    ),
                );
            }
        }
        Ok((t, sort))
    }

    pub fn show_cube(&self, cx: &Cx, c: &Cube) -> String {
        match c {
            Cube::Interval => "I".into(),
            Cube::Unit => "UNIT".into(),
            Cube::Product(a, b) => format!("({} × {})", self.show_cube(cx, a), self.show_cube(cx, b)),
            Cube::Abstract(l) => cx.ctx.name(*l).to_owned(),
        }
    }

    fn cube_term_infer(&self, cx: &Cx, e: &Expr, expected: Option<&Cube>) -> R<(CubeTerm, Cube)> {
        use CubeTerm as C;
        match &e.kind {
            ExprKind::Var(n) => match cx.lookup(n) {
                Some(ScopeItem::CubeAlias(r, c)) => Ok((r.clone(), c.clone())),
                Some(ScopeItem::Local(l)) => match &cx.ctx.entries[*l].kind {
                    EntryKind::Cube(c) => Ok((C::Var(*l), c.clone())),
                    _ => self.err(Code::Sort, e, format!("`{n}` is not a cube variable")),
                },
                Some(_) => self.err(Code::Sort, e, format!("`{n}` is not a cube variable")),
                None if self.global(n).is_some() => {
                    self.err(Code::Sort, e, format!("`{n}` is not a cube variable"))
                }
                None => self.unbound(e, n),
            },
            ExprKind::Zero => Ok((C::Zero, Cube::Interval)),
            ExprKind::One => Ok((C::One, Cube::Interval)),
            ExprKind::Star => Ok((C::Star, Cube::Unit)),
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                let (x, _) = self.cube_term(cx, a, Some(&Cube::Interval))?;
                let (y, _) = self.cube_term(cx, b, Some(&Cube::Interval))?;
                let t = if matches!(e.kind, ExprKind::And(..)) {
                    C::meet(x, y)
                } else {
                    C::join(x, y)
                };
                Ok((t, Cube::Interval))
            }
            ExprKind::Pair(a, b) => {
                let (ea, eb) = match expected {
                    Some(Cube::Product(l, r)) => (Some(&**l), Some(&**r)),
                    _ => (None, None),
                };
                let (x, cx_) = self.cube_term(cx, a, ea)?;
                let (y, cy) = self.cube_term(cx, b, eb)?;
                Ok((C::pair(x, y), Cube::product(cx_, cy)))
            }
            ExprKind::Fst(a) | ExprKind::Snd(a) => {
                let (x, c) = self.cube_term(cx, a, None)?;
                match c {
                    Cube::Product(l, r) => Ok(if matches!(e.kind, ExprKind::Fst(_)) {
                        (cube_fst(x), *l)
                    } else {
                        (cube_snd(x), *r)
                    }),
                    _ => self.err(Code::Sort, e, "projection from a cube term that is not a pair"),
                }
            }
            _ => self.err(Code::Sort, e, format!("expected a cube term, found {}", describe(e))),
        }
    }

    /// A tope family named by `e`: its domain and body over [`CubeTerm::Arg`].
    fn family(&self, cx: &Cx, e: &Expr) -> Option<(Cube, Tope)> {
        let ExprKind::Var(n) = &e.kind else { return None };
        match cx.lookup(n) {
            Some(ScopeItem::Local(l)) => match &cx.ctx.entries[*l].kind {
                EntryKind::Family { domain, .. } => Some((domain.clone(), Tope::Pred(*l, CubeTerm::Arg))),
                _ => None,
            },
            Some(_) => None,
            None => match self.global(n) {
                Some(GlobalItem::Macro(m)) => Some((m.domain.clone(), m.body.clone())),
                _ => None,
            },
        }
    }

    pub fn tope(&self, cx: &Cx, e: &Expr) -> R<Tope> {
        match &e.kind {
            ExprKind::Top => Ok(Tope::Top),
            ExprKind::Bot => Ok(Tope::Bot),
            ExprKind::TopeEq(a, b) => {
                let (x, c) = self.cube_term(cx, a, None)?;
                let (y, _) = self.cube_term(cx, b, Some(&c))?;
                Ok(Tope::Eq(x, y))
            }
            ExprKind::Leq(a, b) => {
                let (x, _) = self.cube_term(cx, a, Some(&Cube::Interval))?;
                let (y, _) = self.cube_term(cx, b, Some(&Cube::Interval))?;
                Ok(Tope::Leq(x, y))
            }
            ExprKind::And(a, b) => Ok(Tope::And(Box::new(self.tope(cx, a)?), Box::new(self.tope(cx, b)?))),
            ExprKind::Or(a, b) => Ok(Tope::Or(Box::new(self.tope(cx, a)?), Box::new(self.tope(cx, b)?))),
            ExprKind::App(f, a) => match self.family(cx, f) {
                Some((domain, body)) => {
                    let (r, _) = self.cube_term(cx, a, Some(&domain))?;
                    Ok(instantiate_tope(&body, &r))
                }
                None => self.err(Code::Sort, f, format!("{} is not a tope family", describe(f))),
            },
            ExprKind::PathType(None, _, _) => self.err(Code::Sort, e, "topes compare cube terms with `≡`, not `=`"),
            ExprKind::Var(n) if cx.lookup(n).is_none() && self.global(n).is_none() => self.unbound(e, n),
            _ => self.err(Code::Sort, e, format!("expected a tope, found {}", describe(e))),
        }
    }

    /// A tope over the point `r`: either a tope, or a bare family name
    /// applied implicitly to `r`.
    fn tope_at(&self, cx: &Cx, e: &Expr, r: &CubeTerm, cube: &Cube) -> R<Tope> {
        if let Some((domain, body)) = self.family(cx, e) {
            if domain != *cube {
                return self.err(Code::Sort, e, format!("tope family {} has the wrong domain", describe(e)));
            }
            return Ok(instantiate_tope(&body, r));
        }
        self.tope(cx, e)
    }

    /// Interpret `e` as a shape, if it is syntactically one: a cube, a
    /// shape literal, a tope family, or a product of shapes.
    pub fn shape(&self, cx: &Cx, e: &Expr) -> Option<R<(Cube, Tope)>> {
        if self.is_cube_sort(cx, e) {
            return Some(self.cube_sort(cx, e).map(|c| (c, Tope::Top)));
        }
        match &e.kind {
            ExprKind::Shape { pattern, cube, tope } => Some((|| {
                let c = self.cube_sort(cx, cube)?;
                let (inner, r) = cx
                    .bind_cube(pattern, c.clone())
                    .or_else(|m| self.err(Code::Sort, e, m))?;
                let t = self.tope(&inner, tope)?;
                let CubeTerm::Var(level) = r else { unreachable!() };
                Ok((c, abstract_tope(&t, level)))
            })()),
            ExprKind::Var(_) => self.family(cx, e).map(Ok),
            ExprKind::Product(a, b) => {
                let sa = self.shape(cx, a)?;
                let sb = self.shape(cx, b)?;
                Some((|| {
                    let (ca, ta) = sa?;
                    let (cb, tb) = sb?;
                    let t = Tope::and(
                        instantiate_tope(&ta, &CubeTerm::fst(CubeTerm::Arg)),
                        instantiate_tope(&tb, &CubeTerm::snd(CubeTerm::Arg)),
                    );
                    Ok((Cube::product(ca, cb), t))
                })())
            }
            _ => None,
        }
    }

    pub fn domain(&self, cx: &Cx, e: &Expr) -> R<Domain> {
        match &e.kind {
            ExprKind::CubeKw => return Ok(Domain::Sort),
            ExprKind::TopeKw => {
                return self.err(Code::Sort, e, "a tope family needs a cube domain, as in `I → TOPE`")
            }
            ExprKind::Arrow(a, b) if matches!(b.kind, ExprKind::TopeKw) => {
                return match self.shape(cx, a) {
                    Some(s) => {
                        let (c, t) = s?;
                        Ok(Domain::Family(c, (t != Tope::Top).then_some(t)))
                    }
                    None => self.err(Code::Sort, a, format!("expected a cube or shape, found {}", describe(a))),
                };
            }
            _ => {}
        }
        if let Some(s) = self.shape(cx, e) {
            let (c, t) = s?;
            return Ok(Domain::Cube(c, t));
        }
        let (t, _) = self.check_type(cx, e)?;
        let v = self.eval(cx, &t);
        if let Val::ShapeType(c, s) = &*self.ck.force(&cx.ctx, &v) {
            return Ok(Domain::Cube(c.clone(), s.clone()));
        }
        Ok(Domain::Type(t, v))
    }

    // ----- types ---------------------------------------------------------

    /// Elaborate a type and return its universe level.
    pub fn check_type(&self, cx: &Cx, e: &Expr) -> R<(RTerm, u32)> {
        let (t, ty) = self.infer(cx, e)?;
        match &*self.ck.force(&cx.ctx, &ty) {
            Val::Universe(l) => Ok((t, *l)),
            _ => self.err(
                Code::Check,
                e,
                format!("{} is not a type; it has type {}", describe(e), self.show(cx, &ty)),
            ),
        }
    }

    /// The universe level of a type value.
    pub fn level_of(&self, cx: &Cx, ty: &RVal) -> Option<u32> {
        let ctx = &cx.ctx;
        match &*self.ck.force(ctx, ty) {
            Val::Universe(l) => Some(l + 1),
            Val::Pi(x, a, b) | Val::Sigma(x, a, b) => {
                let la = self.level_of(cx, a)?;
                let (c, v) = ctx.bind_term(x.clone(), a.clone());
                let lb = self.level_of(&cx.with(c), &b.apply_val(v))?;
                Some(la.max(lb))
            }
            Val::Id(a, _, _) => self.level_of(cx, a),
            Val::ShapeType(..) => Some(0),
            Val::Ext(e) => {
                let (c, r) = ctx.bind_cube(e.name.clone(), e.cube.clone());
                let c = c.assume(&instantiate_tope(&e.shape, &r));
                self.level_of(&cx.with(c), &e.family_at(&r))
            }
            Val::Neutral(h, spine) => {
                let mut ty = self.ck.head_type(ctx, h)?;
                let mut cur = Rc::new(Val::Neutral(h.clone(), Rc::new(Vec::new())));
                for e in spine.iter() {
                    ty = match (e, &*self.ck.force(ctx, &ty)) {
                        (Elim::App(a), Val::Pi(_, _, c)) => c.apply_val(a.clone()),
                        (Elim::Fst, Val::Sigma(_, a, _)) => a.clone(),
                        (Elim::Snd, Val::Sigma(_, _, c)) => c.apply_val(fst(&cur)),
                        (Elim::CubeApp(r), Val::Ext(x)) => x.family_at(r),
                        (Elim::J(j), _) => app(&app(&j.motive, j.rhs.clone()), cur.clone()),
                        _ => return None,
                    };
                    cur = apply_elim(&cur, e);
                }
                match &*self.ck.force(ctx, &ty) {
                    Val::Universe(l) => Some(*l),
                    _ => None,
                }
            }
            Val::RecOr(bs) => {
                let (t, b) = bs.first()?;
                self.level_of(&cx.assume(t), b)
            }
            _ => None,
        }
    }

    fn pi(&self, cx: &Cx, binders: &[(&Pattern, &Expr)], body: &Expr) -> R<(RTerm, u32)> {
        let Some(((p, d), rest)) = binders.split_first() else {
            return self.check_type(cx, body);
        };
        let depth = cx.depth();
        match self.domain(cx, d)? {
            Domain::Type(a, av) => {
                let (inner, _) = cx.bind_term(p, av.clone(), self.ck).or_else(|m| self.err(Code::Check, d, m))?;
                let (b, lb) = self.pi(&inner, rest, body)?;
                let la = self.level_of(cx, &av).unwrap_or(0);
                Ok((Arc::new(Term::Pi(name(&p.binder_name()), a, b)), la.max(lb)))
            }
            Domain::Cube(c, shape) => {
                let (inner, r) = cx.bind_cube(p, c.clone()).or_else(|m| self.err(Code::Sort, d, m))?;
                let inner = inner.assume(&instantiate_tope(&shape, &r));
                let (b, lb) = self.pi(&inner, rest, body)?;
                Ok((
                    Arc::new(Term::Ext(Box::new(ExtTerm {
                        name: name(&p.binder_name()),
                        cube: quote_cube_sort(depth, &c),
                        shape: quote_tope(depth, &shape),
                        family: b,
                        subtope: Tope::Bot,
                        partial: Arc::new(Term::RecBot),
                    }))),
                    lb,
                ))
            }
            Domain::Sort | Domain::Family(..) => self.err(
                Code::Check,
                d,
                "cube sorts and tope families may only be leading parameters of a declaration",
            ),
        }
    }

    fn sigma(&self, cx: &Cx, binders: &[(&Pattern, &Expr)], body: &Expr) -> R<(RTerm, u32)> {
        let Some(((p, d), rest)) = binders.split_first() else {
            return self.check_type(cx, body);
        };
        match self.domain(cx, d)? {
            Domain::Type(a, av) => {
                let (inner, _) = cx.bind_term(p, av.clone(), self.ck).or_else(|m| self.err(Code::Check, d, m))?;
                let (b, lb) = self.sigma(&inner, rest, body)?;
                let la = self.level_of(cx, &av).unwrap_or(0);
                Ok((Arc::new(Term::Sigma(name(&p.binder_name()), a, b)), la.max(lb)))
            }
            _ => self.err(
                Code::Check,
                d,
                "Σ ranges over types; use an extension type for functions on a shape",
            ),
        }
    }

    fn extension(&self, cx: &Cx, e: &Expr, binder: &Binder, family: &Expr, subtope: &Expr, partial: &Expr) -> R<(RTerm, u32)> {
        let [p] = binder.patterns.as_slice() else {
            return self.err(Code::Parse, e, "an extension type binds exactly one cube point");
        };
        let depth = cx.depth();
        let (c, shape) = match self.domain(cx, &binder.ty)? {
            Domain::Cube(c, s) => (c, s),
            _ => {
                return self.err(
                    Code::Check,
                    &binder.ty,
                    format!("the domain of an extension type must be a shape, found {}", describe(&binder.ty)),
                )
            }
        };
        let (inner, r) = cx.bind_cube(p, c.clone()).or_else(|m| self.err(Code::Sort, &binder.ty, m))?;
        let inner = inner.assume(&instantiate_tope(&shape, &r));
        let (fam, level) = self.check_type(&inner, family)?;
        let sub = self.tope_at(&inner, subtope, &r, &c)?;
        let restricted = inner.assume(&sub);
        let fam_v = self.eval(&inner, &fam);
        let part = self.check(&restricted, partial, &fam_v)?;
        let sub_arg = abstract_tope(&sub, depth);
        Ok((
            Arc::new(Term::Ext(Box::new(ExtTerm {
                name: name(&p.binder_name()),
                cube: quote_cube_sort(depth, &c),
                shape: quote_tope(depth, &shape),
                family: fam,
                subtope: quote_tope(depth, &sub_arg),
                partial: part,
            }))),
            level,
        ))
    }

    // ----- inference -------------------------------------------------------

    pub fn infer(&self, cx: &Cx, e: &Expr) -> R<(RTerm, RVal)> {
        let depth = cx.depth();
        let universe = |l: u32| Rc::new(Val::Universe(l));
        match &e.kind {
            ExprKind::Var(_) | ExprKind::Interval | ExprKind::UnitCube | ExprKind::Shape { .. } | ExprKind::Product(..)
                if self.shape(cx, e).is_some() =>
            {
                let (c, t) = self.shape(cx, e).unwrap()?;
                Ok((
                    Arc::new(Term::ShapeType(quote_cube_sort(depth, &c), quote_tope(depth, &t))),
                    universe(0),
                ))
            }
            ExprKind::Var(n) => self.infer_var(cx, e, n),
            ExprKind::Universe(l) => Ok((Arc::new(Term::Universe(*l)), universe(l + 1))),
            ExprKind::Pi(binders, body) => {
                let flat: Vec<(&Pattern, &Expr)> = binders
                    .iter()
                    .flat_map(|b| b.patterns.iter().map(move |p| (p, &b.ty)))
                    .collect();
                let (t, l) = self.pi(cx, &flat, body)?;
                Ok((t, universe(l)))
            }
            ExprKind::Arrow(a, b) => {
                let (t, l) = self.pi(cx, &[(&Pattern::Wildcard, a)], b)?;
                Ok((t, universe(l)))
            }
            ExprKind::Sigma(binders, body) => {
                let flat: Vec<(&Pattern, &Expr)> = binders
                    .iter()
                    .flat_map(|b| b.patterns.iter().map(move |p| (p, &b.ty)))
                    .collect();
                let (t, l) = self.sigma(cx, &flat, body)?;
                Ok((t, universe(l)))
            }
            ExprKind::Product(a, b) => {
                let (t, l) = self.sigma(cx, &[(&Pattern::Wildcard, a)], b)?;
                Ok((t, universe(l)))
            }
            ExprKind::Extension {
                binder,
                family,
                subtope,
                partial,
            } => {
                let (t, l) = self.extension(cx, e, binder, family, subtope, partial)?;
                Ok((t, universe(l)))
            }
            ExprKind::App(..) => self.infer_app(cx, e),
            ExprKind::Pair(a, b) => {
                let (ta, tya) = self.infer(cx, a)?;
                let (tb, tyb) = self.infer(cx, b)?;
                let ty = Rc::new(Val::Sigma(
                    name("_"),
                    tya,
                    Closure {
                        env: cx.ctx.env.clone(),
                        body: {
                            let q = quote(depth, &tyb);
                            shift(&q, 1)
                        },
                    },
                ));
                Ok((Arc::new(Term::Pair(ta, tb)), ty))
            }
            ExprKind::Fst(p) | ExprKind::Snd(p) => {
                let (tp, ty) = self.infer(cx, p)?;
                match &*self.ck.force(&cx.ctx, &ty) {
                    Val::Sigma(_, a, b) => {
                        if matches!(e.kind, ExprKind::Fst(_)) {
                            Ok((Arc::new(Term::Fst(tp)), a.clone()))
                        } else {
                            let first = fst(&self.eval(cx, &tp));
                            Ok((Arc::new(Term::Snd(tp)), b.apply_val(first)))
                        }
                    }
                    _ => self.err(
                        Code::Check,
                        p,
                        format!("projection from {}, which has type {}, not a Σ-type", describe(p), self.show(cx, &ty)),
                    ),
                }
            }
            ExprKind::PathType(a, x, y) => {
                let (ta, tx, ty_, av) = match a {
                    Some(a) => {
                        let (ta, _) = self.check_type(cx, a)?;
                        let av = self.eval(cx, &ta);
                        let tx = self.check(cx, x, &av)?;
                        (ta, tx, self.check(cx, y, &av)?, av)
                    }
                    None => {
                        let (tx, av) = self.infer(cx, x)?;
                        let ty_ = self.check(cx, y, &av)?;
                        (quote(depth, &av), tx, ty_, av)
                    }
                };
                let Some(level) = self.level_of(cx, &av) else {
                    return self.err(Code::Infer, e, "cannot determine the universe of this identity type");
                };
                Ok((Arc::new(Term::Id(ta, tx, ty_)), universe(level)))
            }
            ExprKind::Refl(Some(a)) => {
                let (ta, av) = self.infer(cx, a)?;
                let v = self.eval(cx, &ta);
                Ok((Arc::new(Term::Refl(ta)), Rc::new(Val::Id(av, v.clone(), v))))
            }
            ExprKind::Refl(None) => self.err(Code::Infer, e, "cannot infer the type of `refl`; write `refl_{a}` or annotate"),
            ExprKind::J(c, d, p) => self.infer_j(cx, c, d, p),
            ExprKind::Ann(a, t) => {
                let (tt, _) = self.check_type(cx, t)?;
                let tv = self.eval(cx, &tt);
                Ok((self.check(cx, a, &tv)?, tv))
            }
            ExprKind::Lambda(binders, body) if binders.iter().all(|b| b.ty.is_some()) => {
                self.infer_lambda(cx, binders, body)
            }
            ExprKind::Lambda(..) => self.err(Code::Infer, e, "cannot infer the type of an unannotated λ; annotate it or use it in checking position"),
            ExprKind::RecOr(_) | ExprKind::RecBot => self.err(Code::Infer, e, "cannot infer the type of a tope case split; annotate it"),
            ExprKind::TopeEq(..) | ExprKind::Leq(..) | ExprKind::And(..) | ExprKind::Or(..) | ExprKind::Top | ExprKind::Bot => {
                self.err(Code::Sort, e, format!("tope {} used as a term", describe(e)))
            }
            ExprKind::Zero | ExprKind::One | ExprKind::Star => self.err(Code::Sort, e, format!("cube point {} used as a term", describe(e))),
            ExprKind::CubeKw | ExprKind::TopeKw => self.err(Code::Sort, e, format!("{} may only appear in parameter declarations", describe(e))),
            ExprKind::Interval | ExprKind::UnitCube | ExprKind::Shape { .. } => unreachable!("handled as shapes"),
        }
    }

    fn infer_var(&self, cx: &Cx, e: &Expr, n: &str) -> R<(RTerm, RVal)> {
        let depth = cx.depth();
        match cx.lookup(n) {
            Some(ScopeItem::Local(l)) => match &cx.ctx.entries[*l].kind {
                EntryKind::Term(Some(ty)) => Ok((Arc::new(Term::Var(depth - 1 - l)), ty.clone())),
                EntryKind::Cube(_) => self.err(Code::Sort, e, format!("cube variable `{n}` used as a term")),
                _ => self.err(Code::Sort, e, format!("`{n}` is not a term")),
            },
            Some(ScopeItem::TermAlias(v, ty)) => Ok((quote(depth, v), ty.clone())),
            Some(ScopeItem::CubeAlias(..)) => self.err(Code::Sort, e, format!("cube variable `{n}` used as a term")),
            None => match self.global(n) {
                Some(GlobalItem::Def(def)) => {
                    if !def.schema.is_empty() {
                        return self.err(
                            Code::Infer,
                            e,
                            format!("`{n}` needs {} leading cube or tope family arguments", def.schema.len()),
                        );
                    }
                    Ok((Arc::new(Term::Global(def.clone(), Arc::from(Vec::new()))), global_type(def, &[])))
                }
                Some(GlobalItem::Macro(_)) => unreachable!("tope families are shapes"),
                None => self.unbound(e, n),
            },
        }
    }

    fn infer_lambda(&self, cx: &Cx, binders: &[LamBinder], body: &Expr) -> R<(RTerm, RVal)> {
        let Some((b, rest)) = binders.split_first() else {
            return self.infer(cx, body);
        };
        let ann = b.ty.as_ref().expect("annotated");
        let depth = cx.depth();
        match self.domain(cx, ann)? {
            Domain::Type(a, av) => {
                let (inner, _) = cx.bind_term(&b.pattern, av, self.ck).or_else(|m| self.err(Code::Check, ann, m))?;
                let (tb, tyb) = self.infer_lambda(&inner, rest, body)?;
                let x = name(&b.pattern.binder_name());
                let cod = quote(depth + 1, &tyb);
                let ty = Rc::new(Val::Pi(
                    x.clone(),
                    self.eval(cx, &a),
                    Closure {
                        env: cx.ctx.env.clone(),
                        body: cod,
                    },
                ));
                Ok((Arc::new(Term::Lam(x, tb)), ty))
            }
            Domain::Cube(c, shape) => {
                let (inner, r) = cx.bind_cube(&b.pattern, c.clone()).or_else(|m| self.err(Code::Sort, ann, m))?;
                let inner = inner.assume(&instantiate_tope(&shape, &r));
                let (tb, tyb) = self.infer_lambda(&inner, rest, body)?;
                let x = name(&b.pattern.binder_name());
                let ty = Rc::new(Val::Ext(Rc::new(ExtVal {
                    name: x.clone(),
                    cube: c,
                    shape,
                    family: Closure {
                        env: cx.ctx.env.clone(),
                        body: quote(depth + 1, &tyb),
                    },
                    subtope: Tope::Bot,
                    partial: Closure {
                        env: cx.ctx.env.clone(),
                        body: Arc::new(Term::RecBot),
                    },
                })));
                Ok((Arc::new(Term::CubeLam(x, tb)), ty))
            }
            _ => self.err(Code::Check, ann, "a λ binds a term or a cube point"),
        }
    }

    fn schema_args(&self, cx: &Cx, def: &GlobalDef, args: &[&Expr]) -> R<(Vec<SchemaArg>, Vec<SchemaVal>)> {
        let depth = cx.depth();
        let mut terms = Vec::new();
        let mut vals: Vec<SchemaVal> = Vec::new();
        for (param, arg) in def.schema.iter().zip(args) {
            match &param.kind {
                SchemaParamKind::Sort => {
                    let c = self.cube_sort(cx, arg)?;
                    terms.push(SchemaArg::Sort(quote_cube_sort(depth, &c)));
                    vals.push(SchemaVal::Sort(c));
                }
                SchemaParamKind::Family { domain, bound } => {
                    let env = Env::from_schema(&vals);
                    let domain = eval_cube_sort(&env, domain);
                    let fam = match &arg.kind {
                        ExprKind::Lambda(bs, body) if bs.len() == 1 => {
                            let (inner, r) = cx
                                .bind_cube(&bs[0].pattern, domain.clone())
                                .or_else(|m| self.err(Code::Sort, arg, m))?;
                            let t = self.tope(&inner, body)?;
                            let CubeTerm::Var(level) = r else { unreachable!() };
                            abstract_tope(&t, level)
                        }
                        _ => match self.shape(cx, arg) {
                            Some(s) => {
                                let (c, t) = s?;
                                if c != domain {
                                    return self.err(
                                        Code::Sort,
                                        arg,
                                        format!(
                                            "tope family {} has domain {}, expected {}",
                                            describe(arg),
                                            self.show_cube(cx, &c),
                                            self.show_cube(cx, &domain)
                                        ),
                                    );
                                }
                                t
                            }
                            None => {
                                return self.err(
                                    Code::Sort,
                                    arg,
                                    format!("expected a tope family for `{}`, found {}", param.name, describe(arg)),
                                )
                            }
                        },
                    };
                    if let Some(bound) = bound {
                        let bound = eval_tope(&env, bound);
                        let (inner, r) = cx.ctx.bind_cube(name("•"), domain.clone());
                        let holds = self.ck.holds_under(
                            &inner,
                            &instantiate_tope(&fam, &r),
                            &instantiate_tope(&bound, &r),
                        );
                        if !holds {
                            return self.err(
                                Code::Check,
                                arg,
                                format!("tope family {} is not contained in the bound of `{}`", describe(arg), param.name),
                            );
                        }
                    }
                    terms.push(SchemaArg::Family(quote_tope(depth, &fam)));
                    vals.push(SchemaVal::Family(fam));
                }
            }
        }
        Ok((terms, vals))
    }

    fn infer_app(&self, cx: &Cx, e: &Expr) -> R<(RTerm, RVal)> {
        let (head, args) = flatten_app(e);
        let depth = cx.depth();
        let mut rest = &args[..];
        let (mut term, mut ty) = match &head.kind {
            ExprKind::Var(n) if cx.lookup(n).is_none() => match self.global(n) {
                Some(GlobalItem::Def(def)) if !def.schema.is_empty() => {
                    let k = def.schema.len();
                    if args.len() < k {
                        return self.err(
                            Code::Infer,
                            e,
                            format!("`{n}` needs {k} leading cube or tope family arguments, found {}", args.len()),
                        );
                    }
                    let (terms, vals) = self.schema_args(cx, def, &args[..k])?;
                    rest = &args[k..];
                    (
                        Arc::new(Term::Global(def.clone(), Arc::from(terms))),
                        global_type(def, &vals),
                    )
                }
                Some(GlobalItem::Macro(_)) => {
                    return self.err(Code::Sort, e, format!("tope {} used as a term", describe(e)))
                }
                _ => self.infer(cx, head)?,
            },
            _ => {
                if self.family(cx, head).is_some() {
                    return self.err(Code::Sort, e, format!("tope {} used as a term", describe(e)));
                }
                self.infer(cx, head)?
            }
        };
        for arg in rest {
            let fty = self.ck.force(&cx.ctx, &ty);
            match &*fty {
                Val::Pi(_, a, b) => {
                    let ta = self.check(cx, arg, a)?;
                    ty = b.apply_val(self.eval(cx, &ta));
                    term = Arc::new(Term::App(term, ta));
                }
                Val::Ext(ext) => {
                    let (r, _) = self.cube_term(cx, arg, Some(&ext.cube))?;
                    let shape = instantiate_tope(&ext.shape, &r);
                    if !self.ck.holds(&cx.ctx, &shape) {
                        if let Some(err) = self.ck.take_tope_error() {
                            return self.err(err.code(), arg, err.to_string());
                        }
                        return self.err(
                            Code::Check,
                            arg,
                            format!("the point {} does not lie in the shape of the extension type", describe(arg)),
                        );
                    }
                    ty = ext.family_at(&r);
                    term = Arc::new(Term::CubeApp(term, quote_cube(depth, &r)));
                }
                _ => {
                    return self.err(
                        Code::Check,
                        head,
                        format!("{} is applied to too many arguments; its type is {}", describe(head), self.show(cx, &ty)),
                    )
                }
            }
        }
        Ok((term, ty))
    }

    fn infer_j(&self, cx: &Cx, c: &Expr, d: &Expr, p: &Expr) -> R<(RTerm, RVal)> {
        let depth = cx.depth();
        let (tp, pty) = self.infer(cx, p)?;
        let (a, x, y) = match &*self.ck.force(&cx.ctx, &pty) {
            Val::Id(a, x, y) => (a.clone(), x.clone(), y.clone()),
            _ => {
                return self.err(
                    Code::Check,
                    p,
                    format!("J needs a path, but {} has type {}", describe(p), self.show(cx, &pty)),
                )
            }
        };
        let motive = match &c.kind {
            ExprKind::Lambda(bs, body) if bs.len() == 2 || (bs.len() == 1 && matches!(body.kind, ExprKind::Lambda(ref b2, _) if b2.len() == 1)) => {
                let (b0, b1, inner_body) = if bs.len() == 2 {
                    (&bs[0], &bs[1], &**body)
                } else {
                    let ExprKind::Lambda(b2, inner) = &body.kind else { unreachable!() };
                    (&bs[0], &b2[0], &**inner)
                };
                let (c1, yv) = cx.bind_term(&b0.pattern, a.clone(), self.ck).or_else(|m| self.err(Code::Check, c, m))?;
                let id = Rc::new(Val::Id(a.clone(), x.clone(), yv));
                let (c2, _) = c1.bind_term(&b1.pattern, id, self.ck).or_else(|m| self.err(Code::Check, c, m))?;
                let (tb, _) = self.check_type(&c2, inner_body)?;
                Arc::new(Term::Lam(
                    name(&b0.pattern.binder_name()),
                    Arc::new(Term::Lam(name(&b1.pattern.binder_name()), tb)),
                ))
            }
            _ => {
                let (tc, cty) = self.infer(cx, c)?;
                let ok = match &*self.ck.force(&cx.ctx, &cty) {
                    Val::Pi(_, dom, cod) if self.ck.types_equal(&cx.ctx, dom, &a) => {
                        let (c1, yv) = cx.ctx.bind_term(name("y"), a.clone());
                        match &*self.ck.force(&c1, &cod.apply_val(yv.clone())) {
                            Val::Pi(_, dom2, cod2) => {
                                let id = Rc::new(Val::Id(a.clone(), x.clone(), yv));
                                let (c2, pv) = c1.bind_term(name("p"), dom2.clone());
                                self.ck.types_equal(&c1, dom2, &id)
                                    && matches!(&*self.ck.force(&c2, &cod2.apply_val(pv)), Val::Universe(_))
                            }
                            _ => false,
                        }
                    }
                    _ => false,
                };
                if !ok {
                    return self.err(
                        Code::Check,
                        c,
                        format!("the motive of J must have type Π (y : A) → x = y → U, found {}", self.show(cx, &cty)),
                    );
                }
                tc
            }
        };
        let mv = self.eval(cx, &motive);
        let base_ty = app(&app(&mv, x.clone()), Rc::new(Val::Refl(x.clone())));
        let tb = self.check(cx, d, &base_ty)?;
        let ty = app(&app(&mv, y.clone()), self.eval(cx, &tp));
        Ok((
            Arc::new(Term::J(Box::new(JTerm {
                ty: quote(depth, &a),
                lhs: quote(depth, &x),
                motive,
                base: tb,
                rhs: quote(depth, &y),
                path: tp,
            }))),
            ty,
        ))
    }

    // ----- checking --------------------------------------------------------

    pub fn check(&self, cx: &Cx, e: &Expr, ty: &RVal) -> R<RTerm> {
        let fty = self.ck.force(&cx.ctx, ty);
        match (&e.kind, &*fty) {
            (ExprKind::Lambda(binders, body), _) => self.check_lambda(cx, e, binders, body, ty),
            (ExprKind::Pair(a, b), Val::Sigma(_, fa, fb)) => {
                let ta = self.check(cx, a, fa)?;
                let tb = self.check(cx, b, &fb.apply_val(self.eval(cx, &ta)))?;
                Ok(Arc::new(Term::Pair(ta, tb)))
            }
            (ExprKind::RecOr(branches), _) => self.check_rec_or(cx, e, branches, ty),
            (ExprKind::RecBot, _) => {
                if self.ck.inconsistent(&cx.ctx) {
                    Ok(Arc::new(Term::RecBot))
                } else {
                    self.err(Code::Check, e, "recBOT needs an inconsistent tope context")
                }
            }
            (ExprKind::Refl(None), Val::Id(a, x, y)) => {
                if self.ck.def_equal(&cx.ctx, Some(a), x, y) {
                    Ok(Arc::new(Term::Refl(quote(cx.depth(), x))))
                } else {
                    self.err(
                        Code::Check,
                        e,
                        format!(
                            "refl does not have type {}: the endpoints are not definitionally equal",
                            self.show(cx, ty)
                        ),
                    )
                }
            }
            _ => {
                let (t, ity) = self.infer(cx, e)?;
                if self.ck.types_equal(&cx.ctx, &ity, ty) {
                    Ok(t)
                } else {
                    if let Some(err) = self.ck.take_tope_error() {
                        return self.err(err.code(), e, err.to_string());
                    }
                    Err(Diagnostic::error(
                        Code::Check,
                        self.span(e),
                        format!("type mismatch for {}", describe(e)),
                    )
                    .with_note(self.span(e), format!("expected: {}", self.show(cx, ty)))
                    .with_note(self.span(e), format!("inferred: {}", self.show(cx, &ity))))
                }
            }
        }
    }

    fn check_lambda(&self, cx: &Cx, e: &Expr, binders: &[LamBinder], body: &Expr, ty: &RVal) -> R<RTerm> {
        let Some((b, rest)) = binders.split_first() else {
            return self.check(cx, body, ty);
        };
        let fty = self.ck.force(&cx.ctx, ty);
        let x = name(&b.pattern.binder_name());
        match &*fty {
            Val::Pi(_, a, cod) => {
                if let Some(ann) = &b.ty {
                    let (ta, _) = self.check_type(cx, ann)?;
                    if !self.ck.types_equal(&cx.ctx, &self.eval(cx, &ta), a) {
                        return self.err(
                            Code::Check,
                            ann,
                            format!("binder annotation {} does not match the domain {}", describe(ann), self.show(cx, a)),
                        );
                    }
                }
                let (inner, v) = cx.bind_term(&b.pattern, a.clone(), self.ck).or_else(|m| self.err(Code::Check, e, m))?;
                let tb = self.check_lambda(&inner, e, rest, body, &cod.apply_val(v))?;
                Ok(Arc::new(Term::Lam(x, tb)))
            }
            Val::Ext(ext) => {
                if let Some(ann) = &b.ty {
                    if let Domain::Cube(c, _) = self.domain(cx, ann)? {
                        if c != ext.cube {
                            return self.err(Code::Sort, ann, "binder annotation does not match the cube of the extension type");
                        }
                    }
                }
                let (inner, r) = cx.bind_cube(&b.pattern, ext.cube.clone()).or_else(|m| self.err(Code::Sort, e, m))?;
                let inner = inner.assume(&instantiate_tope(&ext.shape, &r));
                let tb = self.check_lambda(&inner, e, rest, body, &ext.family_at(&r))?;
                let term = Arc::new(Term::CubeLam(x, tb));
                let v = self.eval(cx, &term);
                if !self.ck.check_boundary(&cx.ctx, ext, &v) {
                    if let Some(err) = self.ck.take_tope_error() {
                        return self.err(err.code(), e, err.to_string());
                    }
                    return Err(Diagnostic::error(
                        Code::Check,
                        self.span(e),
                        "the boundary of this λ does not agree with the extension type's partial section",
                    )
                    .with_note(self.span(e), format!("expected type: {}", self.show(cx, ty))));
                }
                Ok(term)
            }
            _ => self.err(
                Code::Check,
                e,
                format!("a λ cannot have type {}", self.show(cx, ty)),
            ),
        }
    }

    fn check_rec_or(&self, cx: &Cx, e: &Expr, branches: &[(Expr, Expr)], ty: &RVal) -> R<RTerm> {
        let mut topes = Vec::new();
        for (t, _) in branches {
            topes.push(self.tope(cx, t)?);
        }
        let cover = topes.iter().cloned().reduce(Tope::or).unwrap_or(Tope::Bot);
        if !self.ck.holds(&cx.ctx, &cover) {
            if let Some(err) = self.ck.take_tope_error() {
                return self.err(err.code(), e, err.to_string());
            }
            return self.err(Code::Check, e, "the branches of recOR do not cover the tope context");
        }
        let mut terms = Vec::new();
        for ((_, b), t) in branches.iter().zip(&topes) {
            terms.push(self.check(&cx.assume(t), b, ty)?);
        }
        let vals: Vec<RVal> = terms.iter().map(|t| self.eval(cx, t)).collect();
        for i in 0..topes.len() {
            for j in i + 1..topes.len() {
                let overlap = cx.ctx.assume(&topes[i]).assume(&topes[j]);
                if !self.ck.def_equal(&overlap, Some(ty), &vals[i], &vals[j]) {
                    return self.err(
                        Code::Check,
                        &branches[j].1,
                        format!("recOR branches {} and {} disagree where both topes hold", i + 1, j + 1),
                    );
                }
            }
        }
        let depth = cx.depth();
        Ok(Arc::new(Term::RecOr(
            topes.iter().map(|t| quote_tope(depth, t)).zip(terms).collect(),
        )))
    }
}

/// Weaken a term by `n` binders.
fn shift(t: &RTerm, n: usize) -> RTerm {
    fn go(t: &Term, n: usize, cut: usize) -> RTerm {
        let g = |x: &RTerm, c: usize| go(x, n, c);
        let cube = |c: &Cube, cut: usize| shift_cube_sort(c, n, cut);
        let tope = |x: &Tope, cut: usize| shift_tope(x, n, cut);
        Arc::new(match t {
            Term::Var(i) => Term::Var(if *i >= cut { i + n } else { *i }),
            Term::Global(d, args) => Term::Global(
                d.clone(),
                args.iter()
                    .map(|a| match a {
                        SchemaArg::Sort(c) => SchemaArg::Sort(cube(c, cut)),
                        SchemaArg::Family(f) => SchemaArg::Family(tope(f, cut)),
                    })
                    .collect(),
            ),
            Term::Universe(l) => Term::Universe(*l),
            Term::Pi(x, a, b) => Term::Pi(x.clone(), g(a, cut), g(b, cut + 1)),
            Term::Lam(x, b) => Term::Lam(x.clone(), g(b, cut + 1)),
            Term::App(f, a) => Term::App(g(f, cut), g(a, cut)),
            Term::Sigma(x, a, b) => Term::Sigma(x.clone(), g(a, cut), g(b, cut + 1)),
            Term::Pair(a, b) => Term::Pair(g(a, cut), g(b, cut)),
            Term::Fst(a) => Term::Fst(g(a, cut)),
            Term::Snd(a) => Term::Snd(g(a, cut)),
            Term::Id(a, x, y) => Term::Id(g(a, cut), g(x, cut), g(y, cut)),
            Term::Refl(a) => Term::Refl(g(a, cut)),
            Term::J(j) => Term::J(Box::new(JTerm {
                ty: g(&j.ty, cut),
                lhs: g(&j.lhs, cut),
                motive: g(&j.motive, cut),
                base: g(&j.base, cut),
                rhs: g(&j.rhs, cut),
                path: g(&j.path, cut),
            })),
            Term::Ext(e) => Term::Ext(Box::new(ExtTerm {
                name: e.name.clone(),
                cube: cube(&e.cube, cut),
                shape: tope(&e.shape, cut),
                family: g(&e.family, cut + 1),
                subtope: tope(&e.subtope, cut),
                partial: g(&e.partial, cut + 1),
            })),
            Term::CubeLam(x, b) => Term::CubeLam(x.clone(), g(b, cut + 1)),
            Term::CubeApp(f, r) => Term::CubeApp(g(f, cut), shift_cube(r, n, cut)),
            Term::ShapeType(c, t) => Term::ShapeType(cube(c, cut), tope(t, cut)),
            Term::RecOr(bs) => Term::RecOr(bs.iter().map(|(t, b)| (tope(t, cut), g(b, cut))).collect()),
            Term::RecBot => Term::RecBot,
        })
    }
    go(t, n, 0)
}

fn shift_cube_sort(c: &Cube, n: usize, cut: usize) -> Cube {
    match c {
        Cube::Interval | Cube::Unit => c.clone(),
        Cube::Product(a, b) => Cube::product(shift_cube_sort(a, n, cut), shift_cube_sort(b, n, cut)),
        Cube::Abstract(i) => Cube::Abstract(if *i >= cut { i + n } else { *i }),
    }
}

fn shift_cube(r: &CubeTerm, n: usize, cut: usize) -> CubeTerm {
    use CubeTerm as C;
    match r {
        C::Var(i) => C::Var(if *i >= cut { i + n } else { *i }),
        C::Arg | C::Zero | C::One | C::Star => r.clone(),
        C::Meet(a, b) => C::meet(shift_cube(a, n, cut), shift_cube(b, n, cut)),
        C::Join(a, b) => C::join(shift_cube(a, n, cut), shift_cube(b, n, cut)),
        C::Pair(a, b) => C::pair(shift_cube(a, n, cut), shift_cube(b, n, cut)),
        C::Fst(a) => C::fst(shift_cube(a, n, cut)),
        C::Snd(a) => C::snd(shift_cube(a, n, cut)),
    }
}

fn shift_tope(t: &Tope, n: usize, cut: usize) -> Tope {
    match t {
        Tope::Top | Tope::Bot => t.clone(),
        Tope::Eq(a, b) => Tope::Eq(shift_cube(a, n, cut), shift_cube(b, n, cut)),
        Tope::Leq(a, b) => Tope::Leq(shift_cube(a, n, cut), shift_cube(b, n, cut)),
        Tope::And(a, b) => Tope::And(Box::new(shift_tope(a, n, cut)), Box::new(shift_tope(b, n, cut))),
        Tope::Or(a, b) => Tope::Or(Box::new(shift_tope(a, n, cut)), Box::new(shift_tope(b, n, cut))),
        Tope::Pred(p, r) => Tope::Pred(if *p >= cut { p + n } else { *p }, shift_cube(r, n, cut)),
    }
}
