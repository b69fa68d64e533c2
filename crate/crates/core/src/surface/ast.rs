//! Surface syntax trees. Types, terms, cube terms and topes share one
//! expression grammar; the checker decides which layer each node lives in.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::diagnostic::Span;

pub type NodeId = u32;

#[derive(Debug, Clone)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Var(String),
    Universe(u32),
    Interval,
    CubeKw,
    TopeKw,
    UnitCube,
    Star,
    Zero,
    One,
    Top,
    Bot,
    Lambda(Vec<LamBinder>, Box<Expr>),
    /// `(x y : A) (z : B) → C`
    Pi(Vec<Binder>, Box<Expr>),
    Arrow(Box<Expr>, Box<Expr>),
    /// `Σ (x : A) (y : B), C`
    Sigma(Vec<Binder>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    /// `a = b` or `a =_{A} b`
    PathType(Option<Box<Expr>>, Box<Expr>, Box<Expr>),
    /// `refl` or `refl_{a}`
    Refl(Option<Box<Expr>>),
    J(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `⟨ Π (t : Ψ) → A | φ ↦ a ⟩`
    Extension {
        binder: Box<Binder>,
        family: Box<Expr>,
        subtope: Box<Expr>,
        partial: Box<Expr>,
    },
    /// `{ p : C | φ }`
    Shape {
        pattern: Pattern,
        cube: Box<Expr>,
        tope: Box<Expr>,
    },
    /// `recOR(φ ↦ a, ψ ↦ b, ...)`
    RecOr(Vec<(Expr, Expr)>),
    RecBot,
    TopeEq(Box<Expr>, Box<Expr>),
    Leq(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Ann(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Var(String),
    Wildcard,
    Pair(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Pattern::Var(n) => out.push(n),
            Pattern::Wildcard => {}
            Pattern::Pair(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Display name used when the whole pattern needs a single binder name.
    pub fn binder_name(&self) -> String {
        match self {
            Pattern::Var(n) => n.clone(),
            Pattern::Wildcard => "_".to_owned(),
            Pattern::Pair(..) => {
                let names = self.names();
                if names.is_empty() {
                    "_".to_owned()
                } else {
                    names.concat()
                }
            }
        }
    }
}

/// A parenthesized binder group `(p₁ p₂ : A)`.
#[derive(Debug, Clone)]
pub struct Binder {
    pub patterns: Vec<Pattern>,
    pub ty: Expr,
}

#[derive(Debug, Clone)]
pub struct LamBinder {
    pub pattern: Pattern,
    pub ty: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeclKind {
    Definition,
    Postulate,
    SectionVariable,
}

#[derive(Debug, Clone)]
pub enum TeleEntry {
    Binder(Binder),
    /// `{φ}`, a tope constraint on the cube parameters introduced so far.
    Constraint(Expr),
}

#[derive(Debug, Clone)]
pub struct Declaration {
    pub name: String,
    pub name_span: Span,
    pub kind: DeclKind,
    pub telescope: Vec<TeleEntry>,
    pub stated_type: Expr,
    pub body: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Import {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Default)]
pub struct SourceModule {
    pub path: PathBuf,
    pub name: String,
    pub imports: Vec<Import>,
    pub declarations: Vec<Declaration>,
    /// Span of every node, indexed by [`NodeId`].
    pub span_table: Vec<Span>,
}

impl SourceModule {
    pub fn span(&self, id: NodeId) -> Span {
        self.span_table.get(id as usize).copied().unwrap_or_default()
    }
}

/// Node id allocator and span table under construction.
#[derive(Debug, Default, Clone)]
pub struct Spans {
    pub table: Vec<Span>,
}

impl Spans {
    pub fn node(&mut self, span: Span, kind: ExprKind) -> Expr {
        let id = self.table.len() as NodeId;
        self.table.push(span);
        Expr { id, kind }
    }

    pub fn get(&self, id: NodeId) -> Span {
        self.table.get(id as usize).copied().unwrap_or_default()
    }
}

// Alpha-equivalence: bound names are compared by binding position, free
// names by spelling. Node ids and spans are ignored.

#[derive(Default)]
struct AlphaEnv {
    left: HashMap<String, Vec<usize>>,
    right: HashMap<String, Vec<usize>>,
    depth: usize,
}

impl AlphaEnv {
    fn bind(&mut self, l: &Pattern, r: &Pattern) -> Option<(Vec<String>, Vec<String>)> {
        let (ln, rn) = (l.names(), r.names());
        if !same_pattern_shape(l, r) {
            return None;
        }
        for (a, b) in ln.iter().zip(&rn) {
            self.left.entry((*a).to_owned()).or_default().push(self.depth);
            self.right.entry((*b).to_owned()).or_default().push(self.depth);
            self.depth += 1;
        }
        Some((
            ln.into_iter().map(str::to_owned).collect(),
            rn.into_iter().map(str::to_owned).collect(),
        ))
    }

    fn unbind(&mut self, (ln, rn): (Vec<String>, Vec<String>)) {
        for n in ln {
            self.left.get_mut(&n).map(Vec::pop);
            self.depth -= 1;
        }
        for n in rn {
            self.right.get_mut(&n).map(Vec::pop);
        }
    }

    fn var_eq(&self, a: &str, b: &str) -> bool {
        let la = self.left.get(a).and_then(|v| v.last());
        let lb = self.right.get(b).and_then(|v| v.last());
        match (la, lb) {
            (Some(x), Some(y)) => x == y,
            (None, None) => a == b,
            _ => false,
        }
    }
}

fn same_pattern_shape(a: &Pattern, b: &Pattern) -> bool {
    match (a, b) {
        (Pattern::Var(_), Pattern::Var(_)) | (Pattern::Wildcard, Pattern::Wildcard) => true,
        (Pattern::Pair(a1, a2), Pattern::Pair(b1, b2)) => {
            same_pattern_shape(a1, b1) && same_pattern_shape(a2, b2)
        }
        _ => false,
    }
}

/// Alpha-equivalence of expressions.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    alpha(&mut AlphaEnv::default(), a, b)
}

fn binders_alpha(
    env: &mut AlphaEnv,
    l: &[Binder],
    r: &[Binder],
    body: &mut dyn FnMut(&mut AlphaEnv) -> bool,
) -> bool {
    match (l.split_first(), r.split_first()) {
        (None, None) => body(env),
        (Some((lb, lrest)), Some((rb, rrest))) => {
            if lb.patterns.len() != rb.patterns.len() || !alpha(env, &lb.ty, &rb.ty) {
                return false;
            }
            let mut bound = Vec::new();
            let mut ok = true;
            for (lp, rp) in lb.patterns.iter().zip(&rb.patterns) {
                match env.bind(lp, rp) {
                    Some(b) => bound.push(b),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            ok = ok && binders_alpha(env, lrest, rrest, body);
            for b in bound.into_iter().rev() {
                env.unbind(b);
            }
            ok
        }
        _ => false,
    }
}

fn alpha(env: &mut AlphaEnv, a: &Expr, b: &Expr) -> bool {
    use ExprKind as K;
    match (&a.kind, &b.kind) {
        (K::Var(x), K::Var(y)) => env.var_eq(x, y),
        (K::Universe(i), K::Universe(j)) => i == j,
        (K::Interval, K::Interval)
        | (K::CubeKw, K::CubeKw)
        | (K::TopeKw, K::TopeKw)
        | (K::UnitCube, K::UnitCube)
        | (K::Star, K::Star)
        | (K::Zero, K::Zero)
        | (K::One, K::One)
        | (K::Top, K::Top)
        | (K::Bot, K::Bot)
        | (K::RecBot, K::RecBot) => true,
        (K::Lambda(lb, lbody), K::Lambda(rb, rbody)) => {
            lam_alpha(env, lb, rb, lbody, rbody)
        }
        (K::Pi(lb, lc), K::Pi(rb, rc)) | (K::Sigma(lb, lc), K::Sigma(rb, rc)) => {
            if std::mem::discriminant(&a.kind) != std::mem::discriminant(&b.kind) {
                return false;
            }
            binders_alpha(env, lb, rb, &mut |env| alpha(env, lc, rc))
        }
        (K::Arrow(a1, a2), K::Arrow(b1, b2))
        | (K::Product(a1, a2), K::Product(b1, b2))
        | (K::App(a1, a2), K::App(b1, b2))
        | (K::Pair(a1, a2), K::Pair(b1, b2))
        | (K::TopeEq(a1, a2), K::TopeEq(b1, b2))
        | (K::Leq(a1, a2), K::Leq(b1, b2))
        | (K::And(a1, a2), K::And(b1, b2))
        | (K::Or(a1, a2), K::Or(b1, b2))
        | (K::Ann(a1, a2), K::Ann(b1, b2)) => {
            std::mem::discriminant(&a.kind) == std::mem::discriminant(&b.kind)
                && alpha(env, a1, b1)
                && alpha(env, a2, b2)
        }
        (K::Fst(x), K::Fst(y)) | (K::Snd(x), K::Snd(y)) => {
            std::mem::discriminant(&a.kind) == std::mem::discriminant(&b.kind) && alpha(env, x, y)
        }
        (K::PathType(t1, l1, r1), K::PathType(t2, l2, r2)) => {
            opt_alpha(env, t1.as_deref(), t2.as_deref()) && alpha(env, l1, l2) && alpha(env, r1, r2)
        }
        (K::Refl(x), K::Refl(y)) => opt_alpha(env, x.as_deref(), y.as_deref()),
        (K::J(a1, a2, a3), K::J(b1, b2, b3)) => {
            alpha(env, a1, b1) && alpha(env, a2, b2) && alpha(env, a3, b3)
        }
        (
            K::Extension {
                binder: lb,
                family: lf,
                subtope: ls,
                partial: lp,
            },
            K::Extension {
                binder: rb,
                family: rf,
                subtope: rs,
                partial: rp,
            },
        ) => binders_alpha(env, std::slice::from_ref(lb), std::slice::from_ref(rb), &mut |env| {
            alpha(env, lf, rf) && alpha(env, ls, rs) && alpha(env, lp, rp)
        }),
        (
            K::Shape {
                pattern: lp,
                cube: lc,
                tope: lt,
            },
            K::Shape {
                pattern: rp,
                cube: rc,
                tope: rt,
            },
        ) => {
            if !alpha(env, lc, rc) {
                return false;
            }
            match env.bind(lp, rp) {
                Some(b) => {
                    let ok = alpha(env, lt, rt);
                    env.unbind(b);
                    ok
                }
                None => false,
            }
        }
        (K::RecOr(l), K::RecOr(r)) => {
            l.len() == r.len()
                && l.iter()
                    .zip(r)
                    .all(|((lt, lv), (rt, rv))| alpha(env, lt, rt) && alpha(env, lv, rv))
        }
        _ => false,
    }
}

fn opt_alpha(env: &mut AlphaEnv, a: Option<&Expr>, b: Option<&Expr>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => alpha(env, a, b),
        _ => false,
    }
}

fn lam_alpha(env: &mut AlphaEnv, l: &[LamBinder], r: &[LamBinder], lb: &Expr, rb: &Expr) -> bool {
    match (l.split_first(), r.split_first()) {
        (None, None) => alpha(env, lb, rb),
        (Some((lh, lt)), Some((rh, rt))) => {
            if !opt_alpha(env, lh.ty.as_ref(), rh.ty.as_ref()) {
                return false;
            }
            match env.bind(&lh.pattern, &rh.pattern) {
                Some(b) => {
                    let ok = lam_alpha(env, lt, rt, lb, rb);
                    env.unbind(b);
                    ok
                }
                None => false,
            }
        }
        _ => false,
    }
}

/// Alpha-equivalence of declarations (name, kind, telescope, type, body).
pub fn decl_alpha_eq(a: &Declaration, b: &Declaration) -> bool {
    if a.name != b.name || a.kind != b.kind || a.telescope.len() != b.telescope.len() {
        return false;
    }
    fn go(env: &mut AlphaEnv, l: &[TeleEntry], r: &[TeleEntry], a: &Declaration, b: &Declaration) -> bool {
        match (l.split_first(), r.split_first()) {
            (None, None) => {
                alpha(env, &a.stated_type, &b.stated_type)
                    && opt_alpha(env, a.body.as_ref(), b.body.as_ref())
            }
            (Some((TeleEntry::Constraint(x), lt)), Some((TeleEntry::Constraint(y), rt))) => {
                alpha(env, x, y) && go(env, lt, rt, a, b)
            }
            (Some((TeleEntry::Binder(x), lt)), Some((TeleEntry::Binder(y), rt))) => {
                binders_alpha(env, std::slice::from_ref(x), std::slice::from_ref(y), &mut |env| {
                    go(env, lt, rt, a, b)
                })
            }
            _ => false,
        }
    }
    go(&mut AlphaEnv::default(), &a.telescope, &b.telescope, a, b)
}

/// Alpha-equivalence of whole modules (imports and declarations).
pub fn module_alpha_eq(a: &SourceModule, b: &SourceModule) -> bool {
    a.imports.len() == b.imports.len()
        && a.imports.iter().zip(&b.imports).all(|(x, y)| x.name == y.name)
        && a.declarations.len() == b.declarations.len()
        && a
            .declarations
            .iter()
            .zip(&b.declarations)
            .all(|(x, y)| decl_alpha_eq(x, y))
}
