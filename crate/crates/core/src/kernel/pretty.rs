//! Rendering of core terms as surface syntax.

use super::syntax::*;
use crate::surface::ast::{Binder, Expr, ExprKind, LamBinder, Pattern};
use crate::surface::print_expr;
use crate::tope::{Cube, CubeTerm, Tope};

/// Print `t` in a context whose variables, innermost last, are `names`.
pub fn show_term(names: &[String], t: &Term) -> String {
    let mut p = Printer {
        names: names.to_vec(),
    };
    print_expr(&p.term(t))
}

fn node(kind: ExprKind) -> Expr {
    Expr { id: 0, kind }
}

fn var(n: &str) -> Expr {
    node(ExprKind::Var(n.to_owned()))
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

struct Printer {
    names: Vec<String>,
}

impl Printer {
    fn lookup(&self, index: usize) -> String {
        match self.names.len().checked_sub(index + 1) {
            Some(l) => self.names[l].clone(),
            None => format!("#{index}"),
        }
    }

    fn fresh(&self, base: &str) -> String {
        let base = if base.is_empty() || base == "_" { "x" } else { base };
        let mut name = base.to_owned();
        while self.names.contains(&name) {
            name.push('′');
        }
        name
    }

    fn under<T>(&mut self, name: &str, f: impl FnOnce(&mut Printer, String) -> T) -> T {
        let n = if name == "_" { "_".to_owned() } else { self.fresh(name) };
        self.names.push(n.clone());
        let out = f(self, n);
        self.names.pop();
        out
    }

    fn term(&mut self, t: &Term) -> Expr {
        match t {
            Term::Var(i) => var(&self.lookup(*i)),
            Term::Global(def, args) => {
                let mut e = var(&def.name);
                for a in args.iter() {
                    let arg = match a {
                        SchemaArg::Sort(c) => self.cube(c),
                        SchemaArg::Family(f) => {
                            let x = self.fresh("x");
                            let body = self.tope(f, Some(&x));
                            node(ExprKind::Lambda(
                                vec![LamBinder {
                                    pattern: Pattern::Var(x),
                                    ty: None,
                                }],
                                bx(body),
                            ))
                        }
                    };
                    e = node(ExprKind::App(bx(e), bx(arg)));
                }
                e
            }
            Term::Universe(l) => node(ExprKind::Universe(*l)),
            Term::Pi(x, a, b) => {
                let dom = self.term(a);
                if &**x == "_" {
                    let cod = self.under("_", |p, _| p.term(b));
                    return node(ExprKind::Arrow(bx(dom), bx(cod)));
                }
                self.under(x, |p, n| {
                    let cod = p.term(b);
                    node(ExprKind::Pi(
                        vec![Binder {
                            patterns: vec![Pattern::Var(n)],
                            ty: dom,
                        }],
                        bx(cod),
                    ))
                })
            }
            Term::Lam(x, b) | Term::CubeLam(x, b) => self.under(x, |p, n| {
                let body = p.term(b);
                let pattern = if n == "_" { Pattern::Wildcard } else { Pattern::Var(n) };
                node(ExprKind::Lambda(vec![LamBinder { pattern, ty: None }], bx(body)))
            }),
            Term::App(f, a) => node(ExprKind::App(bx(self.term(f)), bx(self.term(a)))),
            Term::Sigma(x, a, b) => {
                let dom = self.term(a);
                if &**x == "_" {
                    let cod = self.under("_", |p, _| p.term(b));
                    return node(ExprKind::Product(bx(dom), bx(cod)));
                }
                self.under(x, |p, n| {
                    let cod = p.term(b);
                    node(ExprKind::Sigma(
                        vec![Binder {
                            patterns: vec![Pattern::Var(n)],
                            ty: dom,
                        }],
                        bx(cod),
                    ))
                })
            }
            Term::Pair(a, b) => node(ExprKind::Pair(bx(self.term(a)), bx(self.term(b)))),
            Term::Fst(a) => node(ExprKind::Fst(bx(self.term(a)))),
            Term::Snd(a) => node(ExprKind::Snd(bx(self.term(a)))),
            Term::Id(a, x, y) => node(ExprKind::PathType(
                Some(bx(self.term(a))),
                bx(self.term(x)),
                bx(self.term(y)),
            )),
            Term::Refl(a) => node(ExprKind::Refl(Some(bx(self.term(a))))),
            Term::J(j) => node(ExprKind::J(
                bx(self.term(&j.motive)),
                bx(self.term(&j.base)),
                bx(self.term(&j.path)),
            )),
            Term::Ext(e) => {
                let cube = self.cube(&e.cube);
                let n = self.fresh(&e.name);
                let pure = matches!(e.subtope, Tope::Bot) && matches!(*e.partial, Term::RecBot);
                let dom = if matches!(e.shape, Tope::Top) {
                    cube
                } else {
                    let shape = self.tope(&e.shape, Some(&n));
                    let m = n.clone();
                    node(ExprKind::Shape {
                        pattern: Pattern::Var(m),
                        cube: bx(cube),
                        tope: bx(shape),
                    })
                };
                let subtope = self.tope(&e.subtope, Some(&n));
                self.names.push(n.clone());
                let family = self.term(&e.family);
                let out = if pure {
                    node(ExprKind::Pi(
                        vec![Binder {
                            patterns: vec![Pattern::Var(n.clone())],
                            ty: dom,
                        }],
                        bx(family),
                    ))
                } else {
                    let partial = self.term(&e.partial);
                    node(ExprKind::Extension {
                        binder: Box::new(Binder {
                            patterns: vec![Pattern::Var(n.clone())],
                            ty: dom,
                        }),
                        family: bx(family),
                        subtope: bx(subtope),
                        partial: bx(partial),
                    })
                };
                self.names.pop();
                out
            }
            Term::CubeApp(f, r) => node(ExprKind::App(bx(self.term(f)), bx(self.cube_term(r, None)))),
            Term::ShapeType(c, t) => {
                let cube = self.cube(c);
                let n = self.fresh("t");
                let tope = self.tope(t, Some(&n));
                node(ExprKind::Shape {
                    pattern: Pattern::Var(n),
                    cube: bx(cube),
                    tope: bx(tope),
                })
            }
            Term::RecOr(bs) => node(ExprKind::RecOr(
                bs.iter().map(|(t, b)| (self.tope(t, None), self.term(b))).collect(),
            )),
            Term::RecBot => node(ExprKind::RecBot),
        }
    }

    fn cube(&self, c: &Cube) -> Expr {
        match c {
            Cube::Interval => node(ExprKind::Interval),
            Cube::Unit => node(ExprKind::UnitCube),
            Cube::Product(a, b) => node(ExprKind::Product(bx(self.cube(a)), bx(self.cube(b)))),
            Cube::Abstract(i) => var(&self.lookup(*i)),
        }
    }

    fn cube_term(&self, r: &CubeTerm, arg: Option<&str>) -> Expr {
        use CubeTerm as C;
        match r {
            C::Var(i) => var(&self.lookup(*i)),
            C::Arg => var(arg.unwrap_or("•")),
            C::Zero => node(ExprKind::Zero),
            C::One => node(ExprKind::One),
            C::Star => node(ExprKind::Star),
            C::Meet(a, b) => node(ExprKind::And(bx(self.cube_term(a, arg)), bx(self.cube_term(b, arg)))),
            C::Join(a, b) => node(ExprKind::Or(bx(self.cube_term(a, arg)), bx(self.cube_term(b, arg)))),
            C::Pair(a, b) => node(ExprKind::Pair(bx(self.cube_term(a, arg)), bx(self.cube_term(b, arg)))),
            C::Fst(a) => node(ExprKind::Fst(bx(self.cube_term(a, arg)))),
            C::Snd(a) => node(ExprKind::Snd(bx(self.cube_term(a, arg)))),
        }
    }

    fn tope(&self, t: &Tope, arg: Option<&str>) -> Expr {
        match t {
            Tope::Top => node(ExprKind::Top),
            Tope::Bot => node(ExprKind::Bot),
            Tope::Eq(a, b) => node(ExprKind::TopeEq(bx(self.cube_term(a, arg)), bx(self.cube_term(b, arg)))),
            Tope::Leq(a, b) => node(ExprKind::Leq(bx(self.cube_term(a, arg)), bx(self.cube_term(b, arg)))),
            Tope::And(a, b) => node(ExprKind::And(bx(self.tope(a, arg)), bx(self.tope(b, arg)))),
            Tope::Or(a, b) => node(ExprKind::Or(bx(self.tope(a, arg)), bx(self.tope(b, arg)))),
            Tope::Pred(i, r) => node(ExprKind::App(bx(var(&self.lookup(*i))), bx(self.cube_term(r, arg)))),
        }
    }
}
