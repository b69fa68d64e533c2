//! Typing contexts: an interleaved telescope of typed variables, cube
//! variables, abstract cube sorts, tope families and tope constraints.

use std::cell::OnceCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::syntax::Name;
use super::value::*;
use crate::tope::{Cube, CubeCtx, CubeTerm, PredDecl, Tope};

#[derive(Debug, Clone)]
pub enum EntryKind {
    /// A typed variable; the type is absent only for binders introduced
    /// while comparing terms whose type is unknown.
    Term(Option<RVal>),
    Cube(Cube),
    Sort,
    Family { domain: Cube, bound: Option<Tope> },
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: Name,
    pub kind: EntryKind,
}

/// The solver's view of a context: its cube layer and the renaming from
/// context levels to solver indices.
#[derive(Debug)]
pub struct TopeView {
    pub cube_ctx: CubeCtx,
    vars: HashMap<usize, usize>,
    preds: HashMap<usize, usize>,
    sorts: HashMap<usize, usize>,
}

impl TopeView {
    fn rename_cube(&self, c: &Cube) -> Cube {
        match c {
            Cube::Interval | Cube::Unit => c.clone(),
            Cube::Product(a, b) => Cube::product(self.rename_cube(a), self.rename_cube(b)),
            Cube::Abstract(l) => Cube::Abstract(self.sorts[l]),
        }
    }

    pub fn rename_term(&self, t: &CubeTerm) -> CubeTerm {
        use CubeTerm as C;
        match t {
            C::Var(l) => C::Var(self.vars[l]),
            C::Arg | C::Zero | C::One | C::Star => t.clone(),
            C::Meet(a, b) => C::meet(self.rename_term(a), self.rename_term(b)),
            C::Join(a, b) => C::join(self.rename_term(a), self.rename_term(b)),
            C::Pair(a, b) => C::pair(self.rename_term(a), self.rename_term(b)),
            C::Fst(a) => C::fst(self.rename_term(a)),
            C::Snd(a) => C::snd(self.rename_term(a)),
        }
    }

    pub fn rename(&self, t: &Tope) -> Tope {
        match t {
            Tope::Top | Tope::Bot => t.clone(),
            Tope::Eq(a, b) => Tope::Eq(self.rename_term(a), self.rename_term(b)),
            Tope::Leq(a, b) => Tope::Leq(self.rename_term(a), self.rename_term(b)),
            Tope::And(a, b) => Tope::And(Box::new(self.rename(a)), Box::new(self.rename(b))),
            Tope::Or(a, b) => Tope::Or(Box::new(self.rename(a)), Box::new(self.rename(b))),
            Tope::Pred(l, r) => Tope::Pred(self.preds[l], self.rename_term(r)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ctx {
    pub entries: Vec<Entry>,
    pub env: Env,
    /// Tope constraints as a list of conjuncts.
    pub topes: Vec<Tope>,
    view: OnceCell<Rc<TopeView>>,
    pub(crate) inconsistent: OnceCell<bool>,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    fn extended(&self) -> Ctx {
        Ctx {
            entries: self.entries.clone(),
            env: self.env.clone(),
            topes: self.topes.clone(),
            view: OnceCell::new(),
            inconsistent: OnceCell::new(),
        }
    }

    fn push(&self, name: Name, kind: EntryKind, val: EnvVal) -> Ctx {
        let mut c = if matches!(kind, EntryKind::Term(_)) {
            self.clone()
        } else {
            self.extended()
        };
        c.entries.push(Entry { name, kind });
        c.env = c.env.push(val);
        c
    }

    pub fn bind_term(&self, name: Name, ty: RVal) -> (Ctx, RVal) {
        self.bind_term_opt(name, Some(ty))
    }

    pub fn bind_term_opt(&self, name: Name, ty: Option<RVal>) -> (Ctx, RVal) {
        let v = Val::var(self.depth());
        (self.push(name, EntryKind::Term(ty), EnvVal::Term(v.clone())), v)
    }

    pub fn bind_cube(&self, name: Name, cube: Cube) -> (Ctx, CubeTerm) {
        let r = CubeTerm::Var(self.depth());
        (self.push(name, EntryKind::Cube(cube), EnvVal::Cube(r.clone())), r)
    }

    pub fn bind_sort(&self, name: Name) -> (Ctx, Cube) {
        let c = Cube::Abstract(self.depth());
        (self.push(name, EntryKind::Sort, EnvVal::Sort(c.clone())), c)
    }

    pub fn bind_family(&self, name: Name, domain: Cube, bound: Option<Tope>) -> (Ctx, Tope) {
        let fam = Tope::Pred(self.depth(), CubeTerm::Arg);
        (
            self.push(name, EntryKind::Family { domain, bound }, EnvVal::Family(fam.clone())),
            fam,
        )
    }

    /// Add a tope constraint.
    pub fn assume(&self, t: &Tope) -> Ctx {
        let mut c = self.extended();
        for part in t.conjuncts() {
            if !c.topes.contains(part) {
                c.topes.push(part.clone());
            }
        }
        if matches!(t, Tope::Bot) && !c.topes.contains(&Tope::Bot) {
            c.topes.push(Tope::Bot);
        }
        c
    }

    /// The first disjunctive constraint at or after `from`.
    pub fn disjunction(&self, from: usize) -> Option<(usize, &Tope, &Tope)> {
        self.topes.iter().enumerate().skip(from).find_map(|(i, t)| match t {
            Tope::Or(a, b) => Some((i, &**a, &**b)),
            _ => None,
        })
    }

    /// Replace constraint `i` by `t`.
    pub fn replace_constraint(&self, i: usize, t: &Tope) -> Ctx {
        let mut c = self.extended();
        c.topes.remove(i);
        c.assume(t)
    }

    pub fn hyps(&self) -> Tope {
        Tope::conj(self.topes.iter().cloned())
    }

    pub fn view(&self) -> Rc<TopeView> {
        self.view
            .get_or_init(|| {
                let mut view = TopeView {
                    cube_ctx: CubeCtx::new(),
                    vars: HashMap::new(),
                    preds: HashMap::new(),
                    sorts: HashMap::new(),
                };
                for (level, e) in self.entries.iter().enumerate() {
                    match &e.kind {
                        EntryKind::Term(_) => {}
                        EntryKind::Sort => {
                            view.sorts.insert(level, view.cube_ctx.sorts.len());
                            view.cube_ctx.sorts.push(e.name.to_string());
                        }
                        EntryKind::Cube(c) => {
                            let c = view.rename_cube(c);
                            view.vars.insert(level, view.cube_ctx.vars.len());
                            view.cube_ctx.vars.push((e.name.to_string(), c));
                        }
                        EntryKind::Family { domain, bound } => {
                            let decl = PredDecl {
                                name: e.name.to_string(),
                                domain: view.rename_cube(domain),
                                bound: bound.as_ref().map(|b| view.rename(b)),
                            };
                            view.preds.insert(level, view.cube_ctx.preds.len());
                            view.cube_ctx.preds.push(decl);
                        }
                    }
                }
                Rc::new(view)
            })
            .clone()
    }

    pub fn name(&self, level: usize) -> &str {
        &self.entries[level].name
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.to_string()).collect()
    }
}
