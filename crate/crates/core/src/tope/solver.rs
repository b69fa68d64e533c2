//! Entailment by enumeration of finite models: weak orderings of the
//! interval atoms between 0 and 1, partitions of abstract atoms, and truth
//! assignments of predicate atoms.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use super::flatten::{flatten, FTope, FlatQuery, IExpr, Leaf};
use super::syntax::{CubeCtx, CubeTerm, Shape, Tope};
use super::TopeError;

pub const DEFAULT_CAPACITY: usize = 8;
const MAX_PRED_ATOMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub holds: bool,
    /// Number of candidate models examined.
    pub branches: u64,
}

/// Entailment results keyed by canonical query form. Shared between
/// workers; inserts are published under a write lock.
#[derive(Debug, Default)]
pub struct Memo {
    map: RwLock<HashMap<String, Outcome>>,
}

impl Memo {
    pub fn new() -> Memo {
        Memo::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, key: &str) -> Option<Outcome> {
        self.map.read().get(key).copied()
    }

    fn insert(&self, key: String, outcome: Outcome) {
        self.map.write().entry(key).or_insert(outcome);
    }
}

/// A solver handle: capacity bound, shared memo, per-handle query counter
/// and optional trace.
#[derive(Debug)]
pub struct Solver {
    capacity: usize,
    memo: Arc<Memo>,
    queries: Cell<u64>,
    trace: Option<RefCell<Vec<String>>>,
}

impl Default for Solver {
    fn default() -> Solver {
        Solver::new(DEFAULT_CAPACITY)
    }
}

impl Solver {
    pub fn new(capacity: usize) -> Solver {
        Solver::with_memo(capacity, Arc::new(Memo::new()))
    }

    pub fn with_memo(capacity: usize, memo: Arc<Memo>) -> Solver {
        Solver {
            capacity,
            memo,
            queries: Cell::new(0),
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Solver {
        self.trace = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn memo(&self) -> &Arc<Memo> {
        &self.memo
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    pub fn take_trace(&self) -> Vec<String> {
        self.trace
            .as_ref()
            .map(|t| std::mem::take(&mut *t.borrow_mut()))
            .unwrap_or_default()
    }

    /// Does every model of `ctx` satisfying `hyps` satisfy `goal`?
    pub fn entails(&self, ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<bool, TopeError> {
        Ok(self.entails_outcome(ctx, hyps, goal)?.holds)
    }

    pub fn entails_outcome(&self, ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<Outcome, TopeError> {
        ctx.check_tope(hyps)?;
        ctx.check_tope(goal)?;
        for p in &ctx.preds {
            if let Some(b) = &p.bound {
                ctx.check_tope_in(b, Some(&p.domain))?;
            }
        }
        self.queries.set(self.queries.get() + 1);
        let outcome = self.solve(ctx, hyps, goal)?;
        if let Some(trace) = &self.trace {
            trace.borrow_mut().push(format!(
                "ENTAILS {} |- {} => {} : {} (branches={})",
                ctx.show(),
                ctx.show_tope(hyps),
                ctx.show_tope(goal),
                outcome.holds,
                outcome.branches
            ));
        }
        Ok(outcome)
    }

    fn solve(&self, ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<Outcome, TopeError> {
        let flat = flatten(ctx, hyps, goal)?;
        let atoms = flat.intervals as usize;
        if atoms > self.capacity {
            return Err(TopeError::Capacity {
                found: atoms,
                limit: self.capacity,
            });
        }
        if flat.preds.len() > MAX_PRED_ATOMS {
            return Err(TopeError::Capacity {
                found: flat.preds.len(),
                limit: MAX_PRED_ATOMS,
            });
        }
        if let Some(direct) = trivially_holds(&flat) {
            return Ok(direct);
        }
        let key = flat.key();
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let outcome = decide(&flat);
        self.memo.insert(key, outcome);
        Ok(outcome)
    }

    /// Inclusion of shapes over the same cube variables.
    pub fn shape_included(&self, sub: &Shape, sup: &Shape) -> Result<bool, TopeError> {
        if sub.vars.len() != sup.vars.len() {
            return Err(TopeError::Mismatch(format!(
                "shapes bind {} and {} cube variables",
                sub.vars.len(),
                sup.vars.len()
            )));
        }
        for ((a, ca), (b, cb)) in sub.vars.iter().zip(&sup.vars) {
            if ca != cb {
                return Err(TopeError::Mismatch(format!(
                    "cube variable {a} and {b} have different sorts"
                )));
            }
        }
        let ctx = CubeCtx {
            vars: sub.vars.clone(),
            ..CubeCtx::default()
        };
        self.entails(&ctx, &sub.tope, &sup.tope)
    }

    /// Equality of cube terms under hypotheses, componentwise on products.
    pub fn cube_equal(&self, ctx: &CubeCtx, hyps: &Tope, a: &CubeTerm, b: &CubeTerm) -> Result<bool, TopeError> {
        if a == b {
            ctx.sort_of(a)?;
            return Ok(true);
        }
        self.entails(ctx, hyps, &Tope::Eq(a.clone(), b.clone()))
    }
}

/// Syntactic shortcuts that agree with the model semantics.
fn trivially_holds(q: &FlatQuery) -> Option<Outcome> {
    let yes = Some(Outcome {
        holds: true,
        branches: 0,
    });
    if q.goal == FTope::Top || q.hyps == FTope::Bot {
        return yes;
    }
    let hyps: &[FTope] = match &q.hyps {
        FTope::And(xs) => xs,
        h => std::slice::from_ref(h),
    };
    let goals: &[FTope] = match &q.goal {
        FTope::And(xs) => xs,
        g => std::slice::from_ref(g),
    };
    if goals.iter().all(|g| hyps.contains(g)) {
        return yes;
    }
    None
}

struct Model<'a> {
    ranks: &'a [u32],
    top: u32,
    classes: &'a [u16],
    preds: u32,
}

impl Model<'_> {
    fn value(&self, e: &IExpr) -> u32 {
        match e {
            IExpr::Atom(i) => self.ranks[*i as usize],
            IExpr::Zero => 0,
            IExpr::One => self.top,
            IExpr::Meet(a, b) => self.value(a).min(self.value(b)),
            IExpr::Join(a, b) => self.value(a).max(self.value(b)),
        }
    }

    fn holds(&self, t: &FTope) -> bool {
        match t {
            FTope::Top => true,
            FTope::Bot => false,
            FTope::Leq(a, b) => self.value(a) <= self.value(b),
            FTope::Eq(a, b) => self.value(a) == self.value(b),
            FTope::AEq(a, b) => self.classes[*a as usize] == self.classes[*b as usize],
            FTope::Pred(i) => self.preds & (1 << i) != 0,
            FTope::And(xs) => xs.iter().all(|x| self.holds(x)),
            FTope::Or(xs) => xs.iter().any(|x| self.holds(x)),
        }
    }

    fn leaf(&self, l: &Leaf) -> (bool, u32) {
        match l {
            Leaf::I(e) => (false, self.value(e)),
            Leaf::A(a) => (true, u32::from(self.classes[*a as usize])),
        }
    }
}

/// The reference decision procedure.
pub(crate) fn decide(q: &FlatQuery) -> Outcome {
    let mut branches = 0u64;
    let mut holds = true;
    let n_preds = q.preds.len();
    weak_orderings(q.intervals as usize, &mut |ranks, top| {
        partitions(&q.abstract_sorts, &mut |classes| {
            let mut arg_values: Vec<Vec<(bool, u32)>> = Vec::with_capacity(n_preds);
            {
                let base = Model {
                    ranks,
                    top,
                    classes,
                    preds: 0,
                };
                for p in &q.preds {
                    arg_values.push(p.args.iter().map(|l| base.leaf(l)).collect());
                }
            }
            for mask in 0..(1u32 << n_preds) {
                if !congruent(q, &arg_values, mask) {
                    continue;
                }
                let m = Model {
                    ranks,
                    top,
                    classes,
                    preds: mask,
                };
                let bounded = q.preds.iter().enumerate().all(|(i, p)| {
                    mask & (1 << i) == 0 || p.bound.as_ref().is_none_or(|b| m.holds(b))
                });
                if !bounded {
                    continue;
                }
                branches += 1;
                if m.holds(&q.hyps) && !m.holds(&q.goal) {
                    holds = false;
                    return false;
                }
            }
            true
        })
    });
    Outcome { holds, branches }
}

fn congruent(q: &FlatQuery, args: &[Vec<(bool, u32)>], mask: u32) -> bool {
    for i in 0..q.preds.len() {
        for j in i + 1..q.preds.len() {
            if q.preds[i].family == q.preds[j].family
                && args[i] == args[j]
                && (mask >> i) & 1 != (mask >> j) & 1
            {
                return false;
            }
        }
    }
    true
}

/// Enumerate every weak ordering of `n` atoms in a chain whose bottom is
/// 0 and top is 1. The callback receives the rank of each atom and the rank
/// of 1; it returns `false` to stop.
pub fn weak_orderings(n: usize, f: &mut dyn FnMut(&[u32], u32) -> bool) -> bool {
    fn go(k: usize, ranks: &mut Vec<u32>, interior: u32, f: &mut dyn FnMut(&[u32], u32) -> bool) -> bool {
        if k == ranks.len() {
            return f(ranks, interior + 1);
        }
        for r in 0..=interior + 1 {
            ranks[k] = r;
            if !go(k + 1, ranks, interior, f) {
                return false;
            }
        }
        for gap in 0..=interior {
            for r in ranks[..k].iter_mut() {
                if *r > gap {
                    *r += 1;
                }
            }
            ranks[k] = gap + 1;
            let keep_going = go(k + 1, ranks, interior + 1, f);
            for r in ranks[..k].iter_mut() {
                if *r > gap + 1 {
                    *r -= 1;
                }
            }
            if !keep_going {
                return false;
            }
        }
        true
    }
    let mut ranks = vec![0; n];
    go(0, &mut ranks, 0, f)
}

/// Enumerate partitions of abstract atoms, never merging atoms of
/// different sorts.
fn partitions(sorts: &[u16], f: &mut dyn FnMut(&[u16]) -> bool) -> bool {
    fn go(k: usize, sorts: &[u16], classes: &mut Vec<u16>, class_sorts: &mut Vec<u16>, f: &mut dyn FnMut(&[u16]) -> bool) -> bool {
        if k == sorts.len() {
            return f(classes);
        }
        for c in 0..class_sorts.len() {
            if class_sorts[c] == sorts[k] {
                classes[k] = c as u16;
                if !go(k + 1, sorts, classes, class_sorts, f) {
                    return false;
                }
            }
        }
        classes[k] = class_sorts.len() as u16;
        class_sorts.push(sorts[k]);
        let keep_going = go(k + 1, sorts, classes, class_sorts, f);
        class_sorts.pop();
        keep_going
    }
    let mut classes = vec![0; sorts.len()];
    go(0, sorts, &mut classes, &mut Vec::new(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_ordering_counts() {
        // Sum over j interior atoms of C(n,j) 2^(n-j) Fubini(j).
        let counts: Vec<usize> = (0..5)
            .map(|n| {
                let mut c = 0;
                weak_orderings(n, &mut |_, _| {
                    c += 1;
                    true
                });
                c
            })
            .collect();
        assert_eq!(counts, [1, 3, 11, 51, 299]);
    }

    #[test]
    fn orderings_are_distinct_and_dense() {
        let mut seen = std::collections::HashSet::new();
        weak_orderings(3, &mut |ranks, top| {
            let mut used: Vec<u32> = ranks.iter().copied().filter(|r| *r != 0 && *r != top).collect();
            used.sort_unstable();
            used.dedup();
            assert_eq!(used, (1..top).collect::<Vec<_>>());
            assert!(seen.insert((ranks.to_vec(), top)));
            true
        });
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        let mut c = 0;
        partitions(&[0, 0, 0, 0], &mut |_| {
            c += 1;
            true
        });
        assert_eq!(c, 15);
        let mut c = 0;
        partitions(&[0, 1, 0], &mut |_| {
            c += 1;
            true
        });
        assert_eq!(c, 2);
    }
}
