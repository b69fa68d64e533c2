//! Read-back of values into core terms at a given context depth.

use std::sync::Arc;

use super::syntax::*;
use super::value::*;
use crate::tope::{Cube, CubeTerm, Tope};

fn ix(depth: usize, level: usize) -> usize {
    depth - 1 - level
}

pub fn quote(depth: usize, v: &Val) -> RTerm {
    Arc::new(match v {
        Val::Neutral(head, spine) => {
            let mut t = match head {
                Head::Var(l) => Arc::new(Term::Var(ix(depth, *l))),
                Head::Global(def, args) => Arc::new(Term::Global(
                    def.clone(),
                    args.iter().map(|a| quote_schema(depth, a)).collect(),
                )),
            };
            for e in spine.iter() {
                t = Arc::new(match e {
                    Elim::App(a) => Term::App(t, quote(depth, a)),
                    Elim::Fst => Term::Fst(t),
                    Elim::Snd => Term::Snd(t),
                    Elim::CubeApp(r) => Term::CubeApp(t, quote_cube(depth, r)),
                    Elim::J(j) => Term::J(Box::new(JTerm {
                        ty: quote(depth, &j.ty),
                        lhs: quote(depth, &j.lhs),
                        motive: quote(depth, &j.motive),
                        base: quote(depth, &j.base),
                        rhs: quote(depth, &j.rhs),
                        path: t,
                    })),
                });
            }
            return t;
        }
        Val::Universe(l) => Term::Universe(*l),
        Val::Pi(x, a, b) => Term::Pi(x.clone(), quote(depth, a), quote_closure(depth, b)),
        Val::Lam(x, b) => Term::Lam(x.clone(), quote_closure(depth, b)),
        Val::Sigma(x, a, b) => Term::Sigma(x.clone(), quote(depth, a), quote_closure(depth, b)),
        Val::Pair(a, b) => Term::Pair(quote(depth, a), quote(depth, b)),
        Val::Id(a, x, y) => Term::Id(quote(depth, a), quote(depth, x), quote(depth, y)),
        Val::Refl(a) => Term::Refl(quote(depth, a)),
        Val::Ext(e) => Term::Ext(Box::new(ExtTerm {
            name: e.name.clone(),
            cube: quote_cube_sort(depth, &e.cube),
            shape: quote_tope(depth, &e.shape),
            family: quote_cube_closure(depth, &e.family),
            subtope: quote_tope(depth, &e.subtope),
            partial: quote_cube_closure(depth, &e.partial),
        })),
        Val::CubeLam(x, b) => Term::CubeLam(x.clone(), quote_cube_closure(depth, b)),
        Val::ShapeType(c, t) => Term::ShapeType(quote_cube_sort(depth, c), quote_tope(depth, t)),
        Val::RecOr(bs) => Term::RecOr(
            bs.iter()
                .map(|(t, b)| (quote_tope(depth, t), quote(depth, b)))
                .collect(),
        ),
        Val::RecBot => Term::RecBot,
    })
}

fn quote_closure(depth: usize, c: &Closure) -> RTerm {
    quote(depth + 1, &c.apply_val(Val::var(depth)))
}

fn quote_cube_closure(depth: usize, c: &Closure) -> RTerm {
    quote(depth + 1, &c.apply(EnvVal::Cube(CubeTerm::Var(depth))))
}

pub fn quote_schema(depth: usize, a: &SchemaVal) -> SchemaArg {
    match a {
        SchemaVal::Sort(c) => SchemaArg::Sort(quote_cube_sort(depth, c)),
        SchemaVal::Family(t) => SchemaArg::Family(quote_tope(depth, t)),
    }
}

pub fn quote_cube_sort(depth: usize, c: &Cube) -> Cube {
    match c {
        Cube::Interval | Cube::Unit => c.clone(),
        Cube::Product(a, b) => Cube::product(quote_cube_sort(depth, a), quote_cube_sort(depth, b)),
        Cube::Abstract(l) => Cube::Abstract(ix(depth, *l)),
    }
}

pub fn quote_cube(depth: usize, c: &CubeTerm) -> CubeTerm {
    use CubeTerm as C;
    match c {
        C::Var(l) => C::Var(ix(depth, *l)),
        C::Arg | C::Zero | C::One | C::Star => c.clone(),
        C::Meet(a, b) => C::meet(quote_cube(depth, a), quote_cube(depth, b)),
        C::Join(a, b) => C::join(quote_cube(depth, a), quote_cube(depth, b)),
        C::Pair(a, b) => C::pair(quote_cube(depth, a), quote_cube(depth, b)),
        C::Fst(a) => C::fst(quote_cube(depth, a)),
        C::Snd(a) => C::snd(quote_cube(depth, a)),
    }
}

pub fn quote_tope(depth: usize, t: &Tope) -> Tope {
    match t {
        Tope::Top | Tope::Bot => t.clone(),
        Tope::Eq(a, b) => Tope::Eq(quote_cube(depth, a), quote_cube(depth, b)),
        Tope::Leq(a, b) => Tope::Leq(quote_cube(depth, a), quote_cube(depth, b)),
        Tope::And(a, b) => Tope::And(Box::new(quote_tope(depth, a)), Box::new(quote_tope(depth, b))),
        Tope::Or(a, b) => Tope::Or(Box::new(quote_tope(depth, a)), Box::new(quote_tope(depth, b))),
        Tope::Pred(l, r) => Tope::Pred(ix(depth, *l), quote_cube(depth, r)),
    }
}
