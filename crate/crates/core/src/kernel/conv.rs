//! Weak-head forcing under tope constraints and definitional equality.

use std::cell::RefCell;
use std::rc::Rc;

use super::ctx::{Ctx, EntryKind};
use super::syntax::*;
use super::value::*;
use crate::tope::{CubeTerm, Solver, Tope, TopeError};

/// Order in which [`Checker::normalize`] contracts redexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Head first, then subterms.
    #[default]
    Leftmost,
    /// Subterms first, then the head.
    Innermost,
}

pub struct Checker {
    pub solver: Solver,
    tope_error: RefCell<Option<TopeError>>,
}

impl Checker {
    pub fn new(solver: Solver) -> Checker {
        Checker {
            solver,
            tope_error: RefCell::new(None),
        }
    }

    /// The first solver error since the last call.
    pub fn take_tope_error(&self) -> Option<TopeError> {
        self.tope_error.borrow_mut().take()
    }

    pub fn entails(&self, ctx: &Ctx, extra: &Tope, goal: &Tope) -> Result<bool, TopeError> {
        let view = ctx.view();
        let hyps = view.rename(&Tope::and(ctx.hyps(), extra.clone()));
        let goal = view.rename(goal);
        self.solver.entails(&view.cube_ctx, &hyps, &goal)
    }

    /// Entailment with solver errors recorded and read as failure.
    pub fn holds_under(&self, ctx: &Ctx, extra: &Tope, goal: &Tope) -> bool {
        match self.entails(ctx, extra, goal) {
            Ok(b) => b,
            Err(e) => {
                let mut slot = self.tope_error.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                false
            }
        }
    }

    pub fn holds(&self, ctx: &Ctx, goal: &Tope) -> bool {
        if matches!(goal, Tope::Top) || ctx.topes.contains(goal) {
            return true;
        }
        self.holds_under(ctx, &Tope::Top, goal)
    }

    pub fn inconsistent(&self, ctx: &Ctx) -> bool {
        if ctx.topes.is_empty() {
            return false;
        }
        *ctx.inconsistent.get_or_init(|| self.holds(ctx, &Tope::Bot))
    }

    pub fn tope_equiv(&self, ctx: &Ctx, a: &Tope, b: &Tope) -> bool {
        a == b || (self.holds_under(ctx, a, b) && self.holds_under(ctx, b, a))
    }

    pub fn cube_equal(&self, ctx: &Ctx, a: &CubeTerm, b: &CubeTerm) -> bool {
        a == b || self.holds(ctx, &Tope::Eq(a.clone(), b.clone()))
    }

    pub fn head_type(&self, ctx: &Ctx, h: &Head) -> Option<RVal> {
        match h {
            Head::Var(l) => match &ctx.entries[*l].kind {
                EntryKind::Term(ty) => ty.clone(),
                _ => None,
            },
            Head::Global(def, args) => Some(global_type(def, args)),
        }
    }

    /// Reduce the head of `v` using the tope constraints of `ctx`: select a
    /// branch of a tope case split whose tope holds, and replace an
    /// extension application by its partial section when the point lies in
    /// the subtope.
    pub fn force(&self, ctx: &Ctx, v: &RVal) -> RVal {
        let mut v = v.clone();
        loop {
            let next = match &*v {
                Val::RecOr(bs) => bs
                    .iter()
                    .find(|(t, _)| self.holds(ctx, t))
                    .map(|(_, b)| b.clone()),
                Val::Neutral(h, spine) if spine.iter().any(|e| matches!(e, Elim::CubeApp(_))) => {
                    self.reduce_boundary(ctx, h, spine)
                }
                _ => None,
            };
            match next {
                Some(n) => v = n,
                None => return v,
            }
        }
    }

    fn reduce_boundary(&self, ctx: &Ctx, head: &Head, spine: &[Elim]) -> Option<RVal> {
        let mut ty = self.head_type(ctx, head)?;
        let mut cur = Rc::new(Val::Neutral(head.clone(), Rc::new(Vec::new())));
        for (i, e) in spine.iter().enumerate() {
            let fty = self.force(ctx, &ty);
            ty = match (e, &*fty) {
                (Elim::CubeApp(r), Val::Ext(ext)) => {
                    if ext.subtope != Tope::Bot && self.holds(ctx, &instantiate_tope(&ext.subtope, r)) {
                        let mut res = ext.partial_at(r);
                        for e in &spine[i + 1..] {
                            res = apply_elim(&res, e);
                        }
                        return Some(res);
                    }
                    ext.family_at(r)
                }
                (Elim::App(a), Val::Pi(_, _, c)) => c.apply_val(a.clone()),
                (Elim::Fst, Val::Sigma(_, a, _)) => a.clone(),
                (Elim::Snd, Val::Sigma(_, _, c)) => c.apply_val(fst(&cur)),
                (Elim::J(j), _) => app(&app(&j.motive, j.rhs.clone()), cur.clone()),
                _ => return None,
            };
            cur = apply_elim(&cur, e);
        }
        None
    }

    /// Definitional equality of `a` and `b` at type `ty`; with no type the
    /// comparison is structural and skips eta.
    pub fn def_equal(&self, ctx: &Ctx, ty: Option<&RVal>, a: &RVal, b: &RVal) -> bool {
        self.conv(ctx, ty, a, b, 0)
    }

    pub fn types_equal(&self, ctx: &Ctx, a: &RVal, b: &RVal) -> bool {
        self.conv(ctx, None, a, b, 0)
    }

    /// Constraints at positions `split_from..` may be split on failure;
    /// earlier ones are split by an enclosing comparison.
    fn conv(&self, ctx: &Ctx, ty: Option<&RVal>, a: &RVal, b: &RVal, split_from: usize) -> bool {
        if Rc::ptr_eq(a, b) || self.inconsistent(ctx) {
            return true;
        }
        if self.conv_here(ctx, ty, a, b) {
            return true;
        }
        match ctx.disjunction(split_from) {
            Some((i, l, r)) => {
                let (l, r) = (l.clone(), r.clone());
                self.conv(&ctx.replace_constraint(i, &l), ty, a, b, i)
                    && self.conv(&ctx.replace_constraint(i, &r), ty, a, b, i)
            }
            None => false,
        }
    }

    fn sub(&self, ctx: &Ctx, ty: Option<&RVal>, a: &RVal, b: &RVal) -> bool {
        self.conv(ctx, ty, a, b, ctx.topes.len())
    }

    fn conv_here(&self, ctx: &Ctx, ty: Option<&RVal>, a: &RVal, b: &RVal) -> bool {
        let a = self.force(ctx, a);
        let b = self.force(ctx, b);
        if let Val::RecOr(bs) = &*a {
            return bs.iter().all(|(t, v)| self.sub(&ctx.assume(t), ty, v, &b));
        }
        if let Val::RecOr(bs) = &*b {
            return bs.iter().all(|(t, v)| self.sub(&ctx.assume(t), ty, &a, v));
        }
        let ty = ty.map(|t| self.force(ctx, t));
        match ty.as_deref() {
            Some(Val::Pi(x, dom, cod)) => {
                let (c, v) = ctx.bind_term(x.clone(), dom.clone());
                let cod = cod.apply_val(v.clone());
                return self.sub(&c, Some(&cod), &app(&a, v.clone()), &app(&b, v));
            }
            Some(Val::Sigma(_, fa, fb)) => {
                let (a1, b1) = (fst(&a), fst(&b));
                return self.sub(ctx, Some(fa), &a1, &b1)
                    && self.sub(ctx, Some(&fb.apply_val(a1)), &snd(&a), &snd(&b));
            }
            Some(Val::Ext(e)) => {
                let (c, r) = ctx.bind_cube(e.name.clone(), e.cube.clone());
                let c = c.assume(&instantiate_tope(&e.shape, &r));
                let fam = e.family_at(&r);
                return self.sub(&c, Some(&fam), &cube_app(&a, &r), &cube_app(&b, &r));
            }
            _ => {}
        }
        self.structural(ctx, ty.as_ref(), &a, &b)
    }

    fn structural(&self, ctx: &Ctx, ty: Option<&RVal>, a: &RVal, b: &RVal) -> bool {
        match (&**a, &**b) {
            (Val::Universe(i), Val::Universe(j)) => i == j,
            (Val::Pi(x, a1, b1), Val::Pi(_, a2, b2)) | (Val::Sigma(x, a1, b1), Val::Sigma(_, a2, b2)) => {
                if std::mem::discriminant(&**a) != std::mem::discriminant(&**b) {
                    return false;
                }
                if !self.sub(ctx, None, a1, a2) {
                    return false;
                }
                let (c, v) = ctx.bind_term(x.clone(), a1.clone());
                self.sub(&c, None, &b1.apply_val(v.clone()), &b2.apply_val(v))
            }
            (Val::Id(t1, x1, y1), Val::Id(t2, x2, y2)) => {
                self.sub(ctx, None, t1, t2) && self.sub(ctx, Some(t1), x1, x2) && self.sub(ctx, Some(t1), y1, y2)
            }
            (Val::Refl(x), Val::Refl(y)) => {
                let elem = match ty.map(|t| &**t) {
                    Some(Val::Id(t, _, _)) => Some(t.clone()),
                    _ => None,
                };
                self.sub(ctx, elem.as_ref(), x, y)
            }
            (Val::Ext(e1), Val::Ext(e2)) => self.ext_equal(ctx, e1, e2),
            (Val::ShapeType(c1, t1), Val::ShapeType(c2, t2)) => {
                if c1 != c2 {
                    return false;
                }
                let (c, r) = ctx.bind_cube(crate::kernel::syntax::name("•"), c1.clone());
                self.tope_equiv(&c, &instantiate_tope(t1, &r), &instantiate_tope(t2, &r))
            }
            (Val::Lam(x, b1), Val::Lam(_, b2)) => {
                let (c, v) = ctx.bind_term_opt(x.clone(), None);
                self.sub(&c, None, &b1.apply_val(v.clone()), &b2.apply_val(v))
            }
            (Val::Lam(x, body), _) => {
                let (c, v) = ctx.bind_term_opt(x.clone(), None);
                self.sub(&c, None, &body.apply_val(v.clone()), &app(b, v))
            }
            (_, Val::Lam(x, body)) => {
                let (c, v) = ctx.bind_term_opt(x.clone(), None);
                self.sub(&c, None, &app(a, v.clone()), &body.apply_val(v))
            }
            (Val::Pair(a1, b1), Val::Pair(a2, b2)) => self.sub(ctx, None, a1, a2) && self.sub(ctx, None, b1, b2),
            (Val::Pair(a1, b1), Val::Neutral(..)) => self.sub(ctx, None, a1, &fst(b)) && self.sub(ctx, None, b1, &snd(b)),
            (Val::Neutral(..), Val::Pair(a2, b2)) => self.sub(ctx, None, &fst(a), a2) && self.sub(ctx, None, &snd(a), b2),
            (Val::Neutral(h1, s1), Val::Neutral(h2, s2)) => self.neutral_equal(ctx, h1, s1, h2, s2),
            (Val::RecBot, Val::RecBot) => true,
            _ => false,
        }
    }

    fn ext_equal(&self, ctx: &Ctx, e1: &ExtVal, e2: &ExtVal) -> bool {
        if e1.cube != e2.cube {
            return false;
        }
        let (c, r) = ctx.bind_cube(e1.name.clone(), e1.cube.clone());
        let s1 = instantiate_tope(&e1.shape, &r);
        if !self.tope_equiv(&c, &s1, &instantiate_tope(&e2.shape, &r)) {
            return false;
        }
        let c = c.assume(&s1);
        let fam = e1.family_at(&r);
        if !self.sub(&c, None, &fam, &e2.family_at(&r)) {
            return false;
        }
        let sub1 = instantiate_tope(&e1.subtope, &r);
        if !self.tope_equiv(&c, &sub1, &instantiate_tope(&e2.subtope, &r)) {
            return false;
        }
        if sub1 == Tope::Bot {
            return true;
        }
        self.sub(&c.assume(&sub1), Some(&fam), &e1.partial_at(&r), &e2.partial_at(&r))
    }

    fn schema_equal(&self, ctx: &Ctx, def: &GlobalDef, a1: &[SchemaVal], a2: &[SchemaVal]) -> bool {
        for (i, (x, y)) in a1.iter().zip(a2).enumerate() {
            let ok = match (x, y) {
                (SchemaVal::Sort(c1), SchemaVal::Sort(c2)) => c1 == c2,
                (SchemaVal::Family(t1), SchemaVal::Family(t2)) => {
                    t1 == t2 || {
                        let domain = match &def.schema[i].kind {
                            SchemaParamKind::Family { domain, .. } => {
                                eval_cube_sort(&Env::from_schema(&a1[..i]), domain)
                            }
                            SchemaParamKind::Sort => return false,
                        };
                        let (c, r) = ctx.bind_cube(name("•"), domain);
                        self.tope_equiv(&c, &instantiate_tope(t1, &r), &instantiate_tope(t2, &r))
                    }
                }
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn neutral_equal(&self, ctx: &Ctx, h1: &Head, s1: &[Elim], h2: &Head, s2: &[Elim]) -> bool {
        if s1.len() != s2.len() {
            return false;
        }
        let mut ty = match (h1, h2) {
            (Head::Var(x), Head::Var(y)) if x == y => self.head_type(ctx, h1),
            (Head::Global(d1, a1), Head::Global(d2, a2))
                if d1.uid == d2.uid && self.schema_equal(ctx, d1, a1, a2) =>
            {
                Some(global_type(d1, a1))
            }
            _ => return false,
        };
        let mut cur = Rc::new(Val::Neutral(h1.clone(), Rc::new(Vec::new())));
        for (e1, e2) in s1.iter().zip(s2) {
            let fty = ty.map(|t| self.force(ctx, &t));
            let fty = fty.as_deref();
            ty = match (e1, e2) {
                (Elim::App(x), Elim::App(y)) => {
                    let (dom, next) = match fty {
                        Some(Val::Pi(_, d, c)) => (Some(d.clone()), Some(c.apply_val(x.clone()))),
                        _ => (None, None),
                    };
                    if !self.sub(ctx, dom.as_ref(), x, y) {
                        return false;
                    }
                    next
                }
                (Elim::Fst, Elim::Fst) => match fty {
                    Some(Val::Sigma(_, a, _)) => Some(a.clone()),
                    _ => None,
                },
                (Elim::Snd, Elim::Snd) => match fty {
                    Some(Val::Sigma(_, _, c)) => Some(c.apply_val(fst(&cur))),
                    _ => None,
                },
                (Elim::CubeApp(r1), Elim::CubeApp(r2)) => {
                    if !self.cube_equal(ctx, r1, r2) {
                        return false;
                    }
                    match fty {
                        Some(Val::Ext(e)) => Some(e.family_at(r1)),
                        _ => None,
                    }
                }
                (Elim::J(j1), Elim::J(j2)) => {
                    let base_ty = app(&app(&j1.motive, j1.lhs.clone()), Rc::new(Val::Refl(j1.lhs.clone())));
                    let ok = self.sub(ctx, None, &j1.ty, &j2.ty)
                        && self.sub(ctx, Some(&j1.ty), &j1.lhs, &j2.lhs)
                        && self.sub(ctx, Some(&j1.ty), &j1.rhs, &j2.rhs)
                        && self.sub(ctx, None, &j1.motive, &j2.motive)
                        && self.sub(ctx, Some(&base_ty), &j1.base, &j2.base);
                    if !ok {
                        return false;
                    }
                    Some(app(&app(&j1.motive, j1.rhs.clone()), cur.clone()))
                }
                _ => return false,
            };
            cur = apply_elim(&cur, e1);
        }
        true
    }

    /// Extension introduction: `body` restricted to the subtope is
    /// definitionally the partial section.
    pub fn check_boundary(&self, ctx: &Ctx, ext: &ExtVal, body: &RVal) -> bool {
        if ext.subtope == Tope::Bot {
            return true;
        }
        let (c, r) = ctx.bind_cube(ext.name.clone(), ext.cube.clone());
        let c = c
            .assume(&instantiate_tope(&ext.shape, &r))
            .assume(&instantiate_tope(&ext.subtope, &r));
        let fam = ext.family_at(&r);
        self.def_equal(&c, Some(&fam), &cube_app(body, &r), &ext.partial_at(&r))
    }

    /// Full normal form of `v`, reducing under binders and using the
    /// constraints of `ctx`.
    pub fn normalize(&self, ctx: &Ctx, v: &RVal, strategy: Strategy) -> RTerm {
        let v = match strategy {
            Strategy::Leftmost => self.force(ctx, v),
            Strategy::Innermost => self.force(ctx, &self.reduce_args(ctx, v)),
        };
        let depth = ctx.depth();
        let nf = |c: &Ctx, x: &RVal| self.normalize(c, x, strategy);
        std::sync::Arc::new(match &*v {
            Val::Neutral(h, spine) => {
                let mut t = match h {
                    Head::Var(l) => std::sync::Arc::new(Term::Var(depth - 1 - l)),
                    Head::Global(def, args) => std::sync::Arc::new(Term::Global(
                        def.clone(),
                        args.iter().map(|a| super::quote::quote_schema(depth, a)).collect(),
                    )),
                };
                for e in spine.iter() {
                    t = std::sync::Arc::new(match e {
                        Elim::App(a) => Term::App(t, nf(ctx, a)),
                        Elim::Fst => Term::Fst(t),
                        Elim::Snd => Term::Snd(t),
                        Elim::CubeApp(r) => Term::CubeApp(t, super::quote::quote_cube(depth, r)),
                        Elim::J(j) => Term::J(Box::new(JTerm {
                            ty: nf(ctx, &j.ty),
                            lhs: nf(ctx, &j.lhs),
                            motive: nf(ctx, &j.motive),
                            base: nf(ctx, &j.base),
                            rhs: nf(ctx, &j.rhs),
                            path: t,
                        })),
                    });
                }
                return t;
            }
            Val::Pi(x, a, b) | Val::Sigma(x, a, b) => {
                let (c, var) = ctx.bind_term(x.clone(), a.clone());
                let (a, b) = (nf(ctx, a), nf(&c, &b.apply_val(var)));
                if matches!(&*v, Val::Pi(..)) {
                    Term::Pi(x.clone(), a, b)
                } else {
                    Term::Sigma(x.clone(), a, b)
                }
            }
            Val::Lam(x, b) => {
                let (c, var) = ctx.bind_term_opt(x.clone(), None);
                Term::Lam(x.clone(), nf(&c, &b.apply_val(var)))
            }
            Val::Pair(a, b) => Term::Pair(nf(ctx, a), nf(ctx, b)),
            Val::Id(t, x, y) => Term::Id(nf(ctx, t), nf(ctx, x), nf(ctx, y)),
            Val::Refl(x) => Term::Refl(nf(ctx, x)),
            Val::RecOr(bs) => Term::RecOr(
                bs.iter()
                    .map(|(t, b)| (super::quote::quote_tope(depth, t), nf(&ctx.assume(t), b)))
                    .collect(),
            ),
            _ => return super::quote::quote(depth, &v),
        })
    }

    fn reduce_args(&self, ctx: &Ctx, v: &RVal) -> RVal {
        match &**v {
            Val::Neutral(h, spine) => {
                let spine = spine
                    .iter()
                    .map(|e| match e {
                        Elim::App(a) => Elim::App(self.force(ctx, &self.reduce_args(ctx, a))),
                        e => e.clone(),
                    })
                    .collect();
                Rc::new(Val::Neutral(h.clone(), Rc::new(spine)))
            }
            _ => v.clone(),
        }
    }
}
