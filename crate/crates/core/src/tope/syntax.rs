//! Cube sorts, cube terms, topes and cube contexts.

use std::fmt::{self, Write};

use super::TopeError;

/// A cube: a finite product of intervals, the point cube, or an abstract
/// cube parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cube {
    Interval,
    Unit,
    Product(Box<Cube>, Box<Cube>),
    /// Index into [`CubeCtx::sorts`].
    Abstract(usize),
}

impl Cube {
    pub fn product(a: Cube, b: Cube) -> Cube {
        Cube::Product(Box::new(a), Box::new(b))
    }

    /// The cube `I × … × I` with `n ≥ 1` factors, nested to the right.
    pub fn interval_power(n: usize) -> Cube {
        assert!(n >= 1);
        (1..n).fold(Cube::Interval, |acc, _| Cube::product(Cube::Interval, acc))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CubeTerm {
    /// Index into [`CubeCtx::vars`].
    Var(usize),
    /// The argument of a tope family inside its bound.
    Arg,
    Zero,
    One,
    Star,
    Meet(Box<CubeTerm>, Box<CubeTerm>),
    Join(Box<CubeTerm>, Box<CubeTerm>),
    Pair(Box<CubeTerm>, Box<CubeTerm>),
    Fst(Box<CubeTerm>),
    Snd(Box<CubeTerm>),
}

impl CubeTerm {
    pub fn meet(a: CubeTerm, b: CubeTerm) -> CubeTerm {
        CubeTerm::Meet(Box::new(a), Box::new(b))
    }
    pub fn join(a: CubeTerm, b: CubeTerm) -> CubeTerm {
        CubeTerm::Join(Box::new(a), Box::new(b))
    }
    pub fn pair(a: CubeTerm, b: CubeTerm) -> CubeTerm {
        CubeTerm::Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(a: CubeTerm) -> CubeTerm {
        CubeTerm::Fst(Box::new(a))
    }
    pub fn snd(a: CubeTerm) -> CubeTerm {
        CubeTerm::Snd(Box::new(a))
    }

    /// Replace [`CubeTerm::Arg`] by `arg`.
    pub fn instantiate(&self, arg: &CubeTerm) -> CubeTerm {
        use CubeTerm as C;
        match self {
            C::Arg => arg.clone(),
            C::Var(_) | C::Zero | C::One | C::Star => self.clone(),
            C::Meet(a, b) => C::meet(a.instantiate(arg), b.instantiate(arg)),
            C::Join(a, b) => C::join(a.instantiate(arg), b.instantiate(arg)),
            C::Pair(a, b) => C::pair(a.instantiate(arg), b.instantiate(arg)),
            C::Fst(a) => C::fst(a.instantiate(arg)),
            C::Snd(a) => C::snd(a.instantiate(arg)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tope {
    Top,
    Bot,
    Eq(CubeTerm, CubeTerm),
    Leq(CubeTerm, CubeTerm),
    And(Box<Tope>, Box<Tope>),
    Or(Box<Tope>, Box<Tope>),
    /// A tope family variable applied to a cube term; index into
    /// [`CubeCtx::preds`].
    Pred(usize, CubeTerm),
}

impl Tope {
    pub fn and(a: Tope, b: Tope) -> Tope {
        match (a, b) {
            (Tope::Top, x) | (x, Tope::Top) => x,
            (a, b) => Tope::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Tope, b: Tope) -> Tope {
        match (a, b) {
            (Tope::Bot, x) | (x, Tope::Bot) => x,
            (a, b) => Tope::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn eq(a: CubeTerm, b: CubeTerm) -> Tope {
        Tope::Eq(a, b)
    }

    pub fn leq(a: CubeTerm, b: CubeTerm) -> Tope {
        Tope::Leq(a, b)
    }

    pub fn conj(topes: impl IntoIterator<Item = Tope>) -> Tope {
        topes.into_iter().fold(Tope::Top, Tope::and)
    }

    pub fn instantiate(&self, arg: &CubeTerm) -> Tope {
        match self {
            Tope::Top | Tope::Bot => self.clone(),
            Tope::Eq(a, b) => Tope::Eq(a.instantiate(arg), b.instantiate(arg)),
            Tope::Leq(a, b) => Tope::Leq(a.instantiate(arg), b.instantiate(arg)),
            Tope::And(a, b) => Tope::And(Box::new(a.instantiate(arg)), Box::new(b.instantiate(arg))),
            Tope::Or(a, b) => Tope::Or(Box::new(a.instantiate(arg)), Box::new(b.instantiate(arg))),
            Tope::Pred(p, r) => Tope::Pred(*p, r.instantiate(arg)),
        }
    }

    /// Split top-level conjunctions.
    pub fn conjuncts(&self) -> Vec<&Tope> {
        match self {
            Tope::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            Tope::Top => Vec::new(),
            t => vec![t],
        }
    }
}

/// A tope family variable `φ : C → TOPE`, optionally bounded by another
/// family (`φ ⊆ ψ`), stated as a tope over [`CubeTerm::Arg`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredDecl {
    pub name: String,
    pub domain: Cube,
    pub bound: Option<Tope>,
}

/// The cube layer of a context: abstract cube sorts, cube variables and
/// tope family variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CubeCtx {
    pub sorts: Vec<String>,
    pub vars: Vec<(String, Cube)>,
    pub preds: Vec<PredDecl>,
}

impl CubeCtx {
    pub fn new() -> CubeCtx {
        CubeCtx::default()
    }

    /// A context of interval variables.
    pub fn intervals<S: AsRef<str>>(names: &[S]) -> CubeCtx {
        CubeCtx {
            vars: names
                .iter()
                .map(|n| (n.as_ref().to_owned(), Cube::Interval))
                .collect(),
            ..CubeCtx::default()
        }
    }

    pub fn push_var(&mut self, name: impl Into<String>, cube: Cube) -> CubeTerm {
        self.vars.push((name.into(), cube));
        CubeTerm::Var(self.vars.len() - 1)
    }

    pub fn var(&self, name: &str) -> Option<CubeTerm> {
        self.vars
            .iter()
            .rposition(|(n, _)| n == name)
            .map(CubeTerm::Var)
    }

    pub fn sort_of(&self, t: &CubeTerm) -> Result<Cube, TopeError> {
        self.sort_in(t, None)
    }

    fn sort_in(&self, t: &CubeTerm, arg: Option<&Cube>) -> Result<Cube, TopeError> {
        use CubeTerm as C;
        Ok(match t {
            C::Var(i) => self
                .vars
                .get(*i)
                .map(|(_, c)| c.clone())
                .ok_or_else(|| TopeError::Sort(format!("unbound cube variable #{i}")))?,
            C::Arg => arg
                .cloned()
                .ok_or_else(|| TopeError::Sort("family argument outside a bound".into()))?,
            C::Zero | C::One => Cube::Interval,
            C::Star => Cube::Unit,
            C::Meet(a, b) | C::Join(a, b) => {
                for x in [a, b] {
                    let s = self.sort_in(x, arg)?;
                    if s != Cube::Interval {
                        return Err(TopeError::Sort(format!(
                            "connection operand {} has sort {}, expected I",
                            self.show_term(x),
                            self.show_cube(&s)
                        )));
                    }
                }
                Cube::Interval
            }
            C::Pair(a, b) => Cube::product(self.sort_in(a, arg)?, self.sort_in(b, arg)?),
            C::Fst(a) | C::Snd(a) => match self.sort_in(a, arg)? {
                Cube::Product(l, r) => {
                    if matches!(t, C::Fst(_)) {
                        *l
                    } else {
                        *r
                    }
                }
                s => {
                    return Err(TopeError::Sort(format!(
                        "projection from {} of non-product sort {}",
                        self.show_term(a),
                        self.show_cube(&s)
                    )))
                }
            },
        })
    }

    /// Check that a tope is well-sorted.
    pub fn check_tope(&self, t: &Tope) -> Result<(), TopeError> {
        self.check_tope_in(t, None)
    }

    pub(crate) fn check_tope_in(&self, t: &Tope, arg: Option<&Cube>) -> Result<(), TopeError> {
        match t {
            Tope::Top | Tope::Bot => Ok(()),
            Tope::Eq(a, b) => {
                let (sa, sb) = (self.sort_in(a, arg)?, self.sort_in(b, arg)?);
                if sa != sb {
                    return Err(TopeError::Sort(format!(
                        "cannot compare {} : {} with {} : {}",
                        self.show_term(a),
                        self.show_cube(&sa),
                        self.show_term(b),
                        self.show_cube(&sb)
                    )));
                }
                Ok(())
            }
            Tope::Leq(a, b) => {
                for x in [a, b] {
                    let s = self.sort_in(x, arg)?;
                    if s != Cube::Interval {
                        return Err(TopeError::Sort(format!(
                            "≤ relates interval terms, but {} has sort {}",
                            self.show_term(x),
                            self.show_cube(&s)
                        )));
                    }
                }
                Ok(())
            }
            Tope::And(a, b) | Tope::Or(a, b) => {
                self.check_tope_in(a, arg)?;
                self.check_tope_in(b, arg)
            }
            Tope::Pred(p, r) => {
                let decl = self
                    .preds
                    .get(*p)
                    .ok_or_else(|| TopeError::Sort(format!("unbound tope family #{p}")))?;
                let s = self.sort_in(r, arg)?;
                if s != decl.domain {
                    return Err(TopeError::Sort(format!(
                        "{} expects an argument of sort {}, got {}",
                        decl.name,
                        self.show_cube(&decl.domain),
                        self.show_cube(&s)
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn show_cube(&self, c: &Cube) -> String {
        let mut s = String::new();
        write_cube(self, &mut s, c, false);
        s
    }

    pub fn show_term(&self, t: &CubeTerm) -> String {
        let mut s = String::new();
        write_term(self, &mut s, t, 0);
        s
    }

    pub fn show_tope(&self, t: &Tope) -> String {
        let mut s = String::new();
        write_tope(self, &mut s, t, 0);
        s
    }

    /// `t : I, s : I, φ : I → TOPE`, or `·` when empty.
    pub fn show(&self) -> String {
        let mut parts: Vec<String> = self.sorts.iter().map(|s| format!("{s} : CUBE")).collect();
        parts.extend(
            self.vars
                .iter()
                .map(|(n, c)| format!("{n} : {}", self.show_cube(c))),
        );
        parts.extend(self.preds.iter().map(|p| {
            let mut s = format!("{} : {} → TOPE", p.name, self.show_cube(&p.domain));
            if let Some(b) = &p.bound {
                let _ = write!(s, " ⊆ {}", self.show_tope(b));
            }
            s
        }));
        if parts.is_empty() {
            "·".to_owned()
        } else {
            parts.join(", ")
        }
    }
}

fn write_cube(ctx: &CubeCtx, out: &mut String, c: &Cube, nested: bool) {
    match c {
        Cube::Interval => out.push('I'),
        Cube::Unit => out.push_str("UNIT"),
        Cube::Abstract(i) => match ctx.sorts.get(*i) {
            Some(n) => out.push_str(n),
            None => {
                let _ = write!(out, "?J{i}");
            }
        },
        Cube::Product(a, b) => {
            if nested {
                out.push('(');
            }
            write_cube(ctx, out, a, true);
            out.push_str(" × ");
            write_cube(ctx, out, b, false);
            if nested {
                out.push(')');
            }
        }
    }
}

// Precedence: 0 join, 1 meet, 2 application/atom.
fn write_term(ctx: &CubeCtx, out: &mut String, t: &CubeTerm, min: u8) {
    use CubeTerm as C;
    let level = match t {
        C::Join(..) => 0,
        C::Meet(..) => 1,
        _ => 2,
    };
    let paren = level < min;
    if paren {
        out.push('(');
    }
    match t {
        C::Var(i) => match ctx.vars.get(*i) {
            Some((n, _)) => out.push_str(n),
            None => {
                let _ = write!(out, "?{i}");
            }
        },
        C::Arg => out.push('•'),
        C::Zero => out.push('0'),
        C::One => out.push('1'),
        C::Star => out.push('⋆'),
        C::Join(a, b) => {
            write_term(ctx, out, a, 0);
            out.push_str(" ∨ ");
            write_term(ctx, out, b, 1);
        }
        C::Meet(a, b) => {
            write_term(ctx, out, a, 1);
            out.push_str(" ∧ ");
            write_term(ctx, out, b, 2);
        }
        C::Pair(a, b) => {
            out.push('(');
            write_term(ctx, out, a, 0);
            out.push_str(", ");
            write_term(ctx, out, b, 0);
            out.push(')');
        }
        C::Fst(a) | C::Snd(a) => {
            out.push_str(if matches!(t, C::Fst(_)) { "fst " } else { "snd " });
            let atomic = matches!(
                **a,
                C::Var(_) | C::Arg | C::Zero | C::One | C::Star | C::Pair(..)
            );
            if atomic {
                write_term(ctx, out, a, 2);
            } else {
                out.push('(');
                write_term(ctx, out, a, 0);
                out.push(')');
            }
        }
    }
    if paren {
        out.push(')');
    }
}

// Operands of comparisons are atoms; connections get parentheses.
fn write_operand(ctx: &CubeCtx, out: &mut String, t: &CubeTerm) {
    if matches!(t, CubeTerm::Meet(..) | CubeTerm::Join(..)) {
        out.push('(');
        write_term(ctx, out, t, 0);
        out.push(')');
    } else {
        write_term(ctx, out, t, 2);
    }
}

// Precedence: 0 or, 1 and, 2 atom.
fn write_tope(ctx: &CubeCtx, out: &mut String, t: &Tope, min: u8) {
    let level = match t {
        Tope::Or(..) => 0,
        Tope::And(..) => 1,
        _ => 2,
    };
    let paren = level < min;
    if paren {
        out.push('(');
    }
    match t {
        Tope::Top => out.push('⊤'),
        Tope::Bot => out.push('⊥'),
        Tope::Eq(a, b) | Tope::Leq(a, b) => {
            write_operand(ctx, out, a);
            out.push_str(if matches!(t, Tope::Eq(..)) { " ≡ " } else { " ≤ " });
            write_operand(ctx, out, b);
        }
        Tope::Or(a, b) => {
            write_tope(ctx, out, a, 0);
            out.push_str(" ∨ ");
            write_tope(ctx, out, b, 1);
        }
        Tope::And(a, b) => {
            write_tope(ctx, out, a, 1);
            out.push_str(" ∧ ");
            write_tope(ctx, out, b, 2);
        }
        Tope::Pred(p, r) => {
            match ctx.preds.get(*p) {
                Some(d) => out.push_str(&d.name),
                None => {
                    let _ = write!(out, "?φ{p}");
                }
            }
            out.push(' ');
            write_operand(ctx, out, r);
        }
    }
    if paren {
        out.push(')');
    }
}

/// A shape: cube variables together with a tope over them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    pub vars: Vec<(String, Cube)>,
    pub tope: Tope,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = CubeCtx {
            vars: self.vars.clone(),
            ..CubeCtx::default()
        };
        let names: Vec<_> = self.vars.iter().map(|(n, _)| n.as_str()).collect();
        let cubes: Vec<_> = self.vars.iter().map(|(_, c)| ctx.show_cube(c)).collect();
        write!(
            f,
            "{{({}) : {} | {}}}",
            names.join(", "),
            cubes.join(" × "),
            ctx.show_tope(&self.tope)
        )
    }
}
