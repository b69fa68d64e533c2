//! Semantic values and evaluation. Values use de Bruijn levels; cube terms
//! and topes inside values refer to context levels.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use super::syntax::*;
use crate::tope::{Cube, CubeTerm, Tope};

pub type RVal = Rc<Val>;

#[derive(Debug, Clone)]
pub enum Val {
    Neutral(Head, Rc<Vec<Elim>>),
    Universe(u32),
    Pi(Name, RVal, Closure),
    Lam(Name, Closure),
    Sigma(Name, RVal, Closure),
    Pair(RVal, RVal),
    Id(RVal, RVal, RVal),
    Refl(RVal),
    Ext(Rc<ExtVal>),
    CubeLam(Name, Closure),
    ShapeType(Cube, Tope),
    RecOr(Rc<Vec<(Tope, RVal)>>),
    RecBot,
}

#[derive(Debug, Clone)]
pub enum Head {
    Var(usize),
    Global(Arc<GlobalDef>, Rc<[SchemaVal]>),
}

#[derive(Debug, Clone)]
pub enum Elim {
    App(RVal),
    Fst,
    Snd,
    CubeApp(CubeTerm),
    J(Rc<JElim>),
}

#[derive(Debug, Clone)]
pub struct JElim {
    pub ty: RVal,
    pub lhs: RVal,
    pub motive: RVal,
    pub base: RVal,
    pub rhs: RVal,
}

#[derive(Debug, Clone)]
pub struct ExtVal {
    pub name: Name,
    pub cube: Cube,
    pub shape: Tope,
    pub family: Closure,
    pub subtope: Tope,
    pub partial: Closure,
}

impl ExtVal {
    pub fn family_at(&self, r: &CubeTerm) -> RVal {
        self.family.apply(EnvVal::Cube(r.clone()))
    }

    pub fn partial_at(&self, r: &CubeTerm) -> RVal {
        self.partial.apply(EnvVal::Cube(r.clone()))
    }
}

#[derive(Debug, Clone)]
pub enum SchemaVal {
    Sort(Cube),
    Family(Tope),
}

/// What a context slot holds at evaluation time.
#[derive(Debug, Clone)]
pub enum EnvVal {
    Term(RVal),
    Cube(CubeTerm),
    Sort(Cube),
    /// A tope family as a tope over [`CubeTerm::Arg`].
    Family(Tope),
}

/// Persistent environment indexed by de Bruijn index.
#[derive(Debug, Clone, Default)]
pub struct Env {
    head: Option<Rc<EnvNode>>,
    len: usize,
}

#[derive(Debug)]
struct EnvNode {
    val: EnvVal,
    next: Env,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&self, val: EnvVal) -> Env {
        Env {
            head: Some(Rc::new(EnvNode {
                val,
                next: self.clone(),
            })),
            len: self.len + 1,
        }
    }

    pub fn get(&self, index: usize) -> &EnvVal {
        let mut cur = self;
        for _ in 0..index {
            cur = &cur.head.as_ref().expect("index in range").next;
        }
        &cur.head.as_ref().expect("index in range").val
    }

    pub fn from_schema(args: &[SchemaVal]) -> Env {
        args.iter().fold(Env::new(), |env, a| {
            env.push(match a {
                SchemaVal::Sort(c) => EnvVal::Sort(c.clone()),
                SchemaVal::Family(t) => EnvVal::Family(t.clone()),
            })
        })
    }
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub env: Env,
    pub body: RTerm,
}

impl Closure {
    pub fn apply(&self, v: EnvVal) -> RVal {
        eval(&self.env.push(v), &self.body)
    }

    pub fn apply_val(&self, v: RVal) -> RVal {
        self.apply(EnvVal::Term(v))
    }
}

impl Val {
    pub fn var(level: usize) -> RVal {
        Rc::new(Val::Neutral(Head::Var(level), Rc::new(Vec::new())))
    }
}

thread_local! {
    static GLOBAL_VALUES: RefCell<HashMap<u64, RVal>> = RefCell::new(HashMap::new());
}

fn global_value(def: &Arc<GlobalDef>, args: &[SchemaArg], env: &Env) -> RVal {
    let schema: Vec<SchemaVal> = args.iter().map(|a| eval_schema_arg(env, a)).collect();
    match &def.value {
        Some(value) if schema.is_empty() => {
            if let Some(v) = GLOBAL_VALUES.with(|c| c.borrow().get(&def.uid).cloned()) {
                return v;
            }
            let v = eval(&Env::new(), value);
            GLOBAL_VALUES.with(|c| c.borrow_mut().insert(def.uid, v.clone()));
            v
        }
        Some(value) => eval(&Env::from_schema(&schema), value),
        None => Rc::new(Val::Neutral(
            Head::Global(def.clone(), schema.into()),
            Rc::new(Vec::new()),
        )),
    }
}

pub fn eval_schema_arg(env: &Env, a: &SchemaArg) -> SchemaVal {
    match a {
        SchemaArg::Sort(c) => SchemaVal::Sort(eval_cube_sort(env, c)),
        SchemaArg::Family(t) => SchemaVal::Family(eval_tope(env, t)),
    }
}

/// The type of a global instantiated at schema arguments.
pub fn global_type(def: &GlobalDef, args: &[SchemaVal]) -> RVal {
    eval(&Env::from_schema(args), &def.ty)
}

pub fn eval(env: &Env, t: &Term) -> RVal {
    match t {
        Term::Var(i) => match env.get(*i) {
            EnvVal::Term(v) => v.clone(),
            other => panic!("term variable bound to {other:?}"),
        },
        Term::Global(def, args) => global_value(def, args, env),
        Term::Universe(l) => Rc::new(Val::Universe(*l)),
        Term::Pi(x, a, b) => Rc::new(Val::Pi(x.clone(), eval(env, a), closure(env, b))),
        Term::Lam(x, b) => Rc::new(Val::Lam(x.clone(), closure(env, b))),
        Term::App(f, a) => app(&eval(env, f), eval(env, a)),
        Term::Sigma(x, a, b) => Rc::new(Val::Sigma(x.clone(), eval(env, a), closure(env, b))),
        Term::Pair(a, b) => Rc::new(Val::Pair(eval(env, a), eval(env, b))),
        Term::Fst(p) => fst(&eval(env, p)),
        Term::Snd(p) => snd(&eval(env, p)),
        Term::Id(a, x, y) => Rc::new(Val::Id(eval(env, a), eval(env, x), eval(env, y))),
        Term::Refl(a) => Rc::new(Val::Refl(eval(env, a))),
        Term::J(j) => {
            let elim = JElim {
                ty: eval(env, &j.ty),
                lhs: eval(env, &j.lhs),
                motive: eval(env, &j.motive),
                base: eval(env, &j.base),
                rhs: eval(env, &j.rhs),
            };
            j_elim(Rc::new(elim), &eval(env, &j.path))
        }
        Term::Ext(e) => Rc::new(Val::Ext(Rc::new(ExtVal {
            name: e.name.clone(),
            cube: eval_cube_sort(env, &e.cube),
            shape: eval_tope(env, &e.shape),
            family: closure(env, &e.family),
            subtope: eval_tope(env, &e.subtope),
            partial: closure(env, &e.partial),
        }))),
        Term::CubeLam(x, b) => Rc::new(Val::CubeLam(x.clone(), closure(env, b))),
        Term::CubeApp(f, r) => cube_app(&eval(env, f), &eval_cube(env, r)),
        Term::ShapeType(c, t) => Rc::new(Val::ShapeType(eval_cube_sort(env, c), eval_tope(env, t))),
        Term::RecOr(branches) => rec_or(
            branches
                .iter()
                .map(|(t, b)| (eval_tope(env, t), eval(env, b)))
                .collect(),
        ),
        Term::RecBot => Rc::new(Val::RecBot),
    }
}

fn closure(env: &Env, body: &RTerm) -> Closure {
    Closure {
        env: env.clone(),
        body: body.clone(),
    }
}

/// Build a tope disjunction value, dropping branches whose tope is closed
/// and false and selecting a branch whose tope is closed and true.
pub fn rec_or(branches: Vec<(Tope, RVal)>) -> RVal {
    let mut live = Vec::with_capacity(branches.len());
    for (t, v) in branches {
        match closed_truth(&t) {
            Some(true) => return v,
            Some(false) => {}
            None => live.push((t, v)),
        }
    }
    match live.len() {
        0 => Rc::new(Val::RecBot),
        1 => live.pop().unwrap().1,
        _ => Rc::new(Val::RecOr(Rc::new(live))),
    }
}

/// Truth of a tope without variables.
pub fn closed_truth(t: &Tope) -> Option<bool> {
    fn num(c: &CubeTerm) -> Option<u8> {
        match c {
            CubeTerm::Zero => Some(0),
            CubeTerm::One => Some(1),
            CubeTerm::Meet(a, b) => Some(num(a)?.min(num(b)?)),
            CubeTerm::Join(a, b) => Some(num(a)?.max(num(b)?)),
            _ => None,
        }
    }
    fn point_eq(a: &CubeTerm, b: &CubeTerm) -> Option<bool> {
        match (a, b) {
            (CubeTerm::Star, CubeTerm::Star) => Some(true),
            (CubeTerm::Pair(a1, a2), CubeTerm::Pair(b1, b2)) => {
                Some(point_eq(a1, b1)? && point_eq(a2, b2)?)
            }
            _ => Some(num(a)? == num(b)?),
        }
    }
    match t {
        Tope::Top => Some(true),
        Tope::Bot => Some(false),
        Tope::Eq(a, b) => {
            if a == b && !has_arg(a) {
                return Some(true);
            }
            point_eq(a, b)
        }
        Tope::Leq(a, b) => {
            if a == b && !has_arg(a) {
                return Some(true);
            }
            Some(num(a)? <= num(b)?)
        }
        Tope::And(a, b) => match (closed_truth(a), closed_truth(b)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Tope::Or(a, b) => match (closed_truth(a), closed_truth(b)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Tope::Pred(..) => None,
    }
}

fn has_arg(c: &CubeTerm) -> bool {
    match c {
        CubeTerm::Arg => true,
        CubeTerm::Var(_) | CubeTerm::Zero | CubeTerm::One | CubeTerm::Star => false,
        CubeTerm::Meet(a, b) | CubeTerm::Join(a, b) | CubeTerm::Pair(a, b) => has_arg(a) || has_arg(b),
        CubeTerm::Fst(a) | CubeTerm::Snd(a) => has_arg(a),
    }
}

fn push_elim(head: &Head, spine: &Rc<Vec<Elim>>, e: Elim) -> RVal {
    let mut s = (**spine).clone();
    s.push(e);
    Rc::new(Val::Neutral(head.clone(), Rc::new(s)))
}

fn distribute(branches: &[(Tope, RVal)], f: impl Fn(&RVal) -> RVal) -> RVal {
    Rc::new(Val::RecOr(Rc::new(
        branches.iter().map(|(t, v)| (t.clone(), f(v))).collect(),
    )))
}

pub fn app(f: &RVal, a: RVal) -> RVal {
    match &**f {
        Val::Lam(_, c) => c.apply_val(a),
        Val::Neutral(h, s) => push_elim(h, s, Elim::App(a)),
        Val::RecOr(bs) => distribute(bs, |v| app(v, a.clone())),
        Val::RecBot => f.clone(),
        other => panic!("application of non-function {other:?}"),
    }
}

pub fn fst(p: &RVal) -> RVal {
    match &**p {
        Val::Pair(a, _) => a.clone(),
        Val::Neutral(h, s) => push_elim(h, s, Elim::Fst),
        Val::RecOr(bs) => distribute(bs, fst),
        Val::RecBot => p.clone(),
        other => panic!("projection from non-pair {other:?}"),
    }
}

pub fn snd(p: &RVal) -> RVal {
    match &**p {
        Val::Pair(_, b) => b.clone(),
        Val::Neutral(h, s) => push_elim(h, s, Elim::Snd),
        Val::RecOr(bs) => distribute(bs, snd),
        Val::RecBot => p.clone(),
        other => panic!("projection from non-pair {other:?}"),
    }
}

pub fn cube_app(f: &RVal, r: &CubeTerm) -> RVal {
    match &**f {
        Val::CubeLam(_, c) => c.apply(EnvVal::Cube(r.clone())),
        Val::Neutral(h, s) => push_elim(h, s, Elim::CubeApp(r.clone())),
        Val::RecOr(bs) => distribute(bs, |v| cube_app(v, r)),
        Val::RecBot => f.clone(),
        other => panic!("cube application of non-extension {other:?}"),
    }
}

pub fn j_elim(j: Rc<JElim>, p: &RVal) -> RVal {
    match &**p {
        Val::Refl(_) => j.base.clone(),
        Val::Neutral(h, s) => push_elim(h, s, Elim::J(j)),
        Val::RecOr(bs) => distribute(bs, |v| j_elim(j.clone(), v)),
        Val::RecBot => p.clone(),
        other => panic!("J on non-path {other:?}"),
    }
}

pub fn apply_elim(v: &RVal, e: &Elim) -> RVal {
    match e {
        Elim::App(a) => app(v, a.clone()),
        Elim::Fst => fst(v),
        Elim::Snd => snd(v),
        Elim::CubeApp(r) => cube_app(v, r),
        Elim::J(j) => j_elim(j.clone(), v),
    }
}

pub fn eval_cube_sort(env: &Env, c: &Cube) -> Cube {
    match c {
        Cube::Interval | Cube::Unit => c.clone(),
        Cube::Product(a, b) => Cube::product(eval_cube_sort(env, a), eval_cube_sort(env, b)),
        Cube::Abstract(i) => match env.get(*i) {
            EnvVal::Sort(s) => s.clone(),
            other => panic!("cube sort variable bound to {other:?}"),
        },
    }
}

pub fn eval_cube(env: &Env, c: &CubeTerm) -> CubeTerm {
    use CubeTerm as C;
    match c {
        C::Var(i) => match env.get(*i) {
            EnvVal::Cube(r) => r.clone(),
            other => panic!("cube variable bound to {other:?}"),
        },
        C::Arg | C::Zero | C::One | C::Star => c.clone(),
        C::Meet(a, b) => C::meet(eval_cube(env, a), eval_cube(env, b)),
        C::Join(a, b) => C::join(eval_cube(env, a), eval_cube(env, b)),
        C::Pair(a, b) => C::pair(eval_cube(env, a), eval_cube(env, b)),
        C::Fst(a) => cube_fst(eval_cube(env, a)),
        C::Snd(a) => cube_snd(eval_cube(env, a)),
    }
}

pub fn cube_fst(c: CubeTerm) -> CubeTerm {
    match c {
        CubeTerm::Pair(a, _) => *a,
        c => CubeTerm::fst(c),
    }
}

pub fn cube_snd(c: CubeTerm) -> CubeTerm {
    match c {
        CubeTerm::Pair(_, b) => *b,
        c => CubeTerm::snd(c),
    }
}

pub fn eval_tope(env: &Env, t: &Tope) -> Tope {
    match t {
        Tope::Top | Tope::Bot => t.clone(),
        Tope::Eq(a, b) => Tope::Eq(eval_cube(env, a), eval_cube(env, b)),
        Tope::Leq(a, b) => Tope::Leq(eval_cube(env, a), eval_cube(env, b)),
        Tope::And(a, b) => Tope::And(Box::new(eval_tope(env, a)), Box::new(eval_tope(env, b))),
        Tope::Or(a, b) => Tope::Or(Box::new(eval_tope(env, a)), Box::new(eval_tope(env, b))),
        Tope::Pred(i, r) => match env.get(*i) {
            EnvVal::Family(body) => instantiate_tope(body, &eval_cube(env, r)),
            other => panic!("tope family variable bound to {other:?}"),
        },
    }
}

/// Substitute a cube point for [`CubeTerm::Arg`], simplifying projections.
pub fn instantiate_tope(t: &Tope, r: &CubeTerm) -> Tope {
    fn term(c: &CubeTerm, r: &CubeTerm) -> CubeTerm {
        use CubeTerm as C;
        match c {
            C::Arg => r.clone(),
            C::Var(_) | C::Zero | C::One | C::Star => c.clone(),
            C::Meet(a, b) => C::meet(term(a, r), term(b, r)),
            C::Join(a, b) => C::join(term(a, r), term(b, r)),
            C::Pair(a, b) => C::pair(term(a, r), term(b, r)),
            C::Fst(a) => cube_fst(term(a, r)),
            C::Snd(a) => cube_snd(term(a, r)),
        }
    }
    match t {
        Tope::Top | Tope::Bot => t.clone(),
        Tope::Eq(a, b) => Tope::Eq(term(a, r), term(b, r)),
        Tope::Leq(a, b) => Tope::Leq(term(a, r), term(b, r)),
        Tope::And(a, b) => Tope::And(Box::new(instantiate_tope(a, r)), Box::new(instantiate_tope(b, r))),
        Tope::Or(a, b) => Tope::Or(Box::new(instantiate_tope(a, r)), Box::new(instantiate_tope(b, r))),
        Tope::Pred(p, a) => Tope::Pred(*p, term(a, r)),
    }
}
