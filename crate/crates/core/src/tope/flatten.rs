//! Reduction of a query to atoms: product cubes become tuples of interval
//! atoms, abstract cubes become abstract atoms, tope family applications
//! become predicate atoms. Atoms are numbered by first occurrence, so the
//! flattened query is a canonical form up to renaming.

use std::collections::HashMap;

use super::syntax::{Cube, CubeCtx, CubeTerm, Tope};
use super::TopeError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum IExpr {
    Atom(u16),
    Zero,
    One,
    Meet(Box<IExpr>, Box<IExpr>),
    Join(Box<IExpr>, Box<IExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Leaf {
    I(IExpr),
    A(u16),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum FTope {
    Top,
    Bot,
    Leq(IExpr, IExpr),
    Eq(IExpr, IExpr),
    AEq(u16, u16),
    Pred(u16),
    And(Vec<FTope>),
    Or(Vec<FTope>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct PredAtom {
    pub family: u16,
    pub args: Vec<Leaf>,
    pub bound: Option<FTope>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct FlatQuery {
    pub intervals: u16,
    /// Canonical sort of each abstract atom.
    pub abstract_sorts: Vec<u16>,
    pub preds: Vec<PredAtom>,
    pub hyps: FTope,
    pub goal: FTope,
}

impl FlatQuery {
    pub fn key(&self) -> String {
        format!("{self:?}")
    }
}

/// A cube term with projections of variables kept symbolic until a leaf
/// is demanded.
#[derive(Debug, Clone)]
enum Tree {
    I(IExpr),
    Unit,
    Pair(Box<Tree>, Box<Tree>),
    Var(usize, Vec<u8>, Cube),
}

const MAX_BOUND_DEPTH: usize = 64;

pub(crate) struct Flattener<'a> {
    ctx: &'a CubeCtx,
    intervals: HashMap<(usize, Vec<u8>), u16>,
    abstracts: HashMap<(usize, Vec<u8>), u16>,
    abstract_sorts: Vec<u16>,
    sort_ids: HashMap<usize, u16>,
    family_ids: HashMap<usize, u16>,
    preds: Vec<PredAtom>,
    pred_index: HashMap<(u16, Vec<Leaf>), u16>,
}

pub(crate) fn flatten(ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<FlatQuery, TopeError> {
    let mut f = Flattener {
        ctx,
        intervals: HashMap::new(),
        abstracts: HashMap::new(),
        abstract_sorts: Vec::new(),
        sort_ids: HashMap::new(),
        family_ids: HashMap::new(),
        preds: Vec::new(),
        pred_index: HashMap::new(),
    };
    let hyps = f.tope(hyps, None, 0)?;
    let goal = f.tope(goal, None, 0)?;
    Ok(FlatQuery {
        intervals: f.intervals.len() as u16,
        abstract_sorts: f.abstract_sorts,
        preds: f.preds,
        hyps,
        goal,
    })
}

fn internal(msg: &str) -> TopeError {
    TopeError::Sort(msg.to_owned())
}

impl Flattener<'_> {
    fn tope(&mut self, t: &Tope, arg: Option<&(Tree, Cube)>, depth: usize) -> Result<FTope, TopeError> {
        Ok(match t {
            Tope::Top => FTope::Top,
            Tope::Bot => FTope::Bot,
            Tope::Leq(a, b) => {
                let a = self.term(a, arg)?;
                let b = self.term(b, arg)?;
                FTope::Leq(self.iexpr(a)?, self.iexpr(b)?)
            }
            Tope::Eq(a, b) => {
                let sort = self.sort(a, arg)?;
                let a = self.term(a, arg)?;
                let b = self.term(b, arg)?;
                let mut parts = Vec::new();
                self.equate(a, b, &sort, &mut parts)?;
                match parts.len() {
                    0 => FTope::Top,
                    1 => parts.pop().unwrap(),
                    _ => FTope::And(parts),
                }
            }
            Tope::And(a, b) => {
                let mut parts = Vec::new();
                for x in [a, b] {
                    match self.tope(x, arg, depth)? {
                        FTope::And(xs) => parts.extend(xs),
                        x => parts.push(x),
                    }
                }
                FTope::And(parts)
            }
            Tope::Or(a, b) => {
                let mut parts = Vec::new();
                for x in [a, b] {
                    match self.tope(x, arg, depth)? {
                        FTope::Or(xs) => parts.extend(xs),
                        x => parts.push(x),
                    }
                }
                FTope::Or(parts)
            }
            Tope::Pred(p, r) => {
                let decl = self
                    .ctx
                    .preds
                    .get(*p)
                    .ok_or_else(|| internal("unbound tope family"))?;
                let family = {
                    let next = self.family_ids.len() as u16;
                    *self.family_ids.entry(*p).or_insert(next)
                };
                let tree = self.term(r, arg)?;
                let mut args = Vec::new();
                self.leaves(tree.clone(), &decl.domain, &mut args)?;
                let key = (family, args.clone());
                if let Some(&i) = self.pred_index.get(&key) {
                    return Ok(FTope::Pred(i));
                }
                let index = self.preds.len() as u16;
                self.pred_index.insert(key, index);
                self.preds.push(PredAtom {
                    family,
                    args,
                    bound: None,
                });
                if let Some(bound) = &decl.bound {
                    if depth >= MAX_BOUND_DEPTH {
                        return Err(internal("tope family bounds nest too deeply"));
                    }
                    let arg = (tree, decl.domain.clone());
                    let b = self.tope(bound, Some(&arg), depth + 1)?;
                    self.preds[index as usize].bound = Some(b);
                }
                FTope::Pred(index)
            }
        })
    }

    fn sort(&self, t: &CubeTerm, arg: Option<&(Tree, Cube)>) -> Result<Cube, TopeError> {
        let ctx = self.ctx;
        match arg {
            None => ctx.sort_of(t),
            Some((_, c)) => {
                let mut extended = ctx.clone();
                let fresh = extended.vars.len();
                extended.vars.push(("•".into(), c.clone()));
                extended.sort_of(&t.instantiate(&CubeTerm::Var(fresh)))
            }
        }
    }

    fn term(&mut self, t: &CubeTerm, arg: Option<&(Tree, Cube)>) -> Result<Tree, TopeError> {
        use CubeTerm as C;
        Ok(match t {
            C::Var(i) => {
                let cube = self
                    .ctx
                    .vars
                    .get(*i)
                    .map(|(_, c)| c.clone())
                    .ok_or_else(|| internal("unbound cube variable"))?;
                Tree::Var(*i, Vec::new(), cube)
            }
            C::Arg => arg
                .map(|(t, _)| t.clone())
                .ok_or_else(|| internal("family argument outside a bound"))?,
            C::Zero => Tree::I(IExpr::Zero),
            C::One => Tree::I(IExpr::One),
            C::Star => Tree::Unit,
            C::Meet(a, b) | C::Join(a, b) => {
                let a = self.term(a, arg)?;
                let b = self.term(b, arg)?;
                let (a, b) = (Box::new(self.iexpr(a)?), Box::new(self.iexpr(b)?));
                Tree::I(if matches!(t, C::Meet(..)) {
                    IExpr::Meet(a, b)
                } else {
                    IExpr::Join(a, b)
                })
            }
            C::Pair(a, b) => Tree::Pair(Box::new(self.term(a, arg)?), Box::new(self.term(b, arg)?)),
            C::Fst(a) => project(self.term(a, arg)?, 0)?,
            C::Snd(a) => project(self.term(a, arg)?, 1)?,
        })
    }

    fn iexpr(&mut self, t: Tree) -> Result<IExpr, TopeError> {
        match t {
            Tree::I(e) => Ok(e),
            Tree::Var(i, path, Cube::Interval) => {
                let next = self.intervals.len() as u16;
                Ok(IExpr::Atom(*self.intervals.entry((i, path)).or_insert(next)))
            }
            _ => Err(internal("expected an interval term")),
        }
    }

    fn abstract_atom(&mut self, t: Tree) -> Result<u16, TopeError> {
        match t {
            Tree::Var(i, path, Cube::Abstract(s)) => {
                if let Some(&a) = self.abstracts.get(&(i, path.clone())) {
                    return Ok(a);
                }
                let next_sort = self.sort_ids.len() as u16;
                let sort = *self.sort_ids.entry(s).or_insert(next_sort);
                let a = self.abstract_sorts.len() as u16;
                self.abstract_sorts.push(sort);
                self.abstracts.insert((i, path), a);
                Ok(a)
            }
            _ => Err(internal("expected a term of an abstract cube")),
        }
    }

    fn equate(&mut self, a: Tree, b: Tree, sort: &Cube, out: &mut Vec<FTope>) -> Result<(), TopeError> {
        match sort {
            Cube::Unit => Ok(()),
            Cube::Interval => {
                let (a, b) = (self.iexpr(a)?, self.iexpr(b)?);
                if a != b {
                    out.push(FTope::Eq(a, b));
                }
                Ok(())
            }
            Cube::Abstract(_) => {
                let (a, b) = (self.abstract_atom(a)?, self.abstract_atom(b)?);
                if a != b {
                    out.push(FTope::AEq(a, b));
                }
                Ok(())
            }
            Cube::Product(l, r) => {
                self.equate(project(a.clone(), 0)?, project(b.clone(), 0)?, l, out)?;
                self.equate(project(a, 1)?, project(b, 1)?, r, out)
            }
        }
    }

    fn leaves(&mut self, t: Tree, sort: &Cube, out: &mut Vec<Leaf>) -> Result<(), TopeError> {
        match sort {
            Cube::Unit => Ok(()),
            Cube::Interval => {
                out.push(Leaf::I(self.iexpr(t)?));
                Ok(())
            }
            Cube::Abstract(_) => {
                out.push(Leaf::A(self.abstract_atom(t)?));
                Ok(())
            }
            Cube::Product(l, r) => {
                self.leaves(project(t.clone(), 0)?, l, out)?;
                self.leaves(project(t, 1)?, r, out)
            }
        }
    }
}

fn project(t: Tree, side: u8) -> Result<Tree, TopeError> {
    match t {
        Tree::Pair(a, b) => Ok(if side == 0 { *a } else { *b }),
        Tree::Var(i, mut path, Cube::Product(l, r)) => {
            path.push(side);
            Ok(Tree::Var(i, path, if side == 0 { *l } else { *r }))
        }
        _ => Err(internal("projection from a non-product term")),
    }
}
