//! Read topes and cube terms from surface syntax against a cube context.

use super::syntax::{CubeCtx, CubeTerm, Tope};
use super::TopeError;
use crate::surface::{parse_expr, Expr, ExprKind};

pub fn read_tope(ctx: &CubeCtx, source: &str) -> Result<Tope, TopeError> {
    tope_of(ctx, &parse(source)?)
}

pub fn read_term(ctx: &CubeCtx, source: &str) -> Result<CubeTerm, TopeError> {
    term_of(ctx, &parse(source)?)
}

fn parse(source: &str) -> Result<Expr, TopeError> {
    parse_expr(source)
        .map(|(e, _)| e)
        .map_err(|d| TopeError::Sort(d.iter().map(|d| d.message.clone()).collect::<Vec<_>>().join("; ")))
}

pub fn tope_of(ctx: &CubeCtx, e: &Expr) -> Result<Tope, TopeError> {
    Ok(match &e.kind {
        ExprKind::Top => Tope::Top,
        ExprKind::Bot => Tope::Bot,
        ExprKind::TopeEq(a, b) => Tope::Eq(term_of(ctx, a)?, term_of(ctx, b)?),
        ExprKind::Leq(a, b) => Tope::Leq(term_of(ctx, a)?, term_of(ctx, b)?),
        ExprKind::And(a, b) => Tope::And(Box::new(tope_of(ctx, a)?), Box::new(tope_of(ctx, b)?)),
        ExprKind::Or(a, b) => Tope::Or(Box::new(tope_of(ctx, a)?), Box::new(tope_of(ctx, b)?)),
        ExprKind::App(f, x) => match &f.kind {
            ExprKind::Var(name) => {
                let p = ctx
                    .preds
                    .iter()
                    .rposition(|p| &p.name == name)
                    .ok_or_else(|| TopeError::Sort(format!("`{name}` is not a tope family")))?;
                Tope::Pred(p, term_of(ctx, x)?)
            }
            _ => return Err(TopeError::Sort("expected a tope".into())),
        },
        _ => return Err(TopeError::Sort("expected a tope".into())),
    })
}

pub fn term_of(ctx: &CubeCtx, e: &Expr) -> Result<CubeTerm, TopeError> {
    let bin = |a: &Expr, b: &Expr| Ok::<_, TopeError>((term_of(ctx, a)?, term_of(ctx, b)?));
    Ok(match &e.kind {
        ExprKind::Var(name) => ctx
            .var(name)
            .ok_or_else(|| TopeError::Sort(format!("unbound cube variable `{name}`")))?,
        ExprKind::Zero => CubeTerm::Zero,
        ExprKind::One => CubeTerm::One,
        ExprKind::Star => CubeTerm::Star,
        ExprKind::And(a, b) => {
            let (a, b) = bin(a, b)?;
            CubeTerm::meet(a, b)
        }
        ExprKind::Or(a, b) => {
            let (a, b) = bin(a, b)?;
            CubeTerm::join(a, b)
        }
        ExprKind::Pair(a, b) => {
            let (a, b) = bin(a, b)?;
            CubeTerm::pair(a, b)
        }
        ExprKind::Fst(a) => CubeTerm::fst(term_of(ctx, a)?),
        ExprKind::Snd(a) => CubeTerm::snd(term_of(ctx, a)?),
        _ => return Err(TopeError::Sort("expected a cube term".into())),
    })
}
