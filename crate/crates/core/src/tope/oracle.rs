//! Independent test oracle: evaluates topes over real-valued assignments
//! on a finite grid, without flattening.

use super::syntax::{Cube, CubeCtx, CubeTerm, Tope};
use super::TopeError;

pub const ORACLE_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
enum Val {
    Num(f64),
    Unit,
    Pair(Box<Val>, Box<Val>),
}

fn interval_count(c: &Cube) -> Result<usize, TopeError> {
    match c {
        Cube::Interval => Ok(1),
        Cube::Unit => Ok(0),
        Cube::Product(a, b) => Ok(interval_count(a)? + interval_count(b)?),
        Cube::Abstract(_) => Err(TopeError::Sort("the oracle only handles products of I".into())),
    }
}

fn build(c: &Cube, nums: &mut impl Iterator<Item = f64>) -> Val {
    match c {
        Cube::Interval => Val::Num(nums.next().expect("enough grid values")),
        Cube::Unit => Val::Unit,
        Cube::Product(a, b) => Val::Pair(Box::new(build(a, nums)), Box::new(build(b, nums))),
        Cube::Abstract(_) => unreachable!(),
    }
}

fn eval(env: &[Val], t: &CubeTerm) -> Val {
    use CubeTerm as C;
    match t {
        C::Var(i) => env[*i].clone(),
        C::Arg => unreachable!("oracle queries have no tope families"),
        C::Zero => Val::Num(0.0),
        C::One => Val::Num(1.0),
        C::Star => Val::Unit,
        C::Meet(a, b) | C::Join(a, b) => match (eval(env, a), eval(env, b)) {
            (Val::Num(x), Val::Num(y)) => Val::Num(if matches!(t, C::Meet(..)) { x.min(y) } else { x.max(y) }),
            _ => unreachable!("sort-checked"),
        },
        C::Pair(a, b) => Val::Pair(Box::new(eval(env, a)), Box::new(eval(env, b))),
        C::Fst(a) | C::Snd(a) => match eval(env, a) {
            Val::Pair(l, r) => {
                if matches!(t, C::Fst(_)) {
                    *l
                } else {
                    *r
                }
            }
            _ => unreachable!("sort-checked"),
        },
    }
}

fn satisfies(env: &[Val], t: &Tope) -> bool {
    match t {
        Tope::Top => true,
        Tope::Bot => false,
        Tope::Eq(a, b) => eval(env, a) == eval(env, b),
        Tope::Leq(a, b) => match (eval(env, a), eval(env, b)) {
            (Val::Num(x), Val::Num(y)) => x <= y,
            _ => unreachable!("sort-checked"),
        },
        Tope::And(a, b) => satisfies(env, a) && satisfies(env, b),
        Tope::Or(a, b) => satisfies(env, a) || satisfies(env, b),
        Tope::Pred(..) => unreachable!("rejected before evaluation"),
    }
}

fn has_pred(t: &Tope) -> bool {
    match t {
        Tope::Pred(..) => true,
        Tope::And(a, b) | Tope::Or(a, b) => has_pred(a) || has_pred(b),
        _ => false,
    }
}

/// Check `hyps → goal` at every point of the grid {0, 1} ∪ {i/(k+1)} for
/// the k interval components of the context.
pub fn oracle_entails(ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<bool, TopeError> {
    ctx.check_tope(hyps)?;
    ctx.check_tope(goal)?;
    if has_pred(hyps) || has_pred(goal) {
        return Err(TopeError::Sort("the oracle does not handle tope families".into()));
    }
    let mut k = 0;
    for (_, c) in &ctx.vars {
        k += interval_count(c)?;
    }
    if k > ORACLE_LIMIT {
        return Err(TopeError::Capacity {
            found: k,
            limit: ORACLE_LIMIT,
        });
    }
    let mut grid = vec![0.0, 1.0];
    grid.extend((1..=k).map(|i| i as f64 / (k + 1) as f64));
    let points = grid.len().pow(k as u32);
    let mut digits = vec![0usize; k];
    for _ in 0..points {
        let mut nums = digits.iter().map(|&d| grid[d]);
        let env: Vec<Val> = ctx.vars.iter().map(|(_, c)| build(c, &mut nums)).collect();
        if satisfies(&env, hyps) && !satisfies(&env, goal) {
            return Ok(false);
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < grid.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(true)
}
