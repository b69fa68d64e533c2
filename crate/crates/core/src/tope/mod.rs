//! The cube and tope layers and the entailment decision procedure.

mod flatten;
pub mod oracle;
pub mod reader;
pub mod solver;
pub mod syntax;

use thiserror::Error;

use crate::diagnostic::Code;

pub use oracle::oracle_entails;
pub use reader::{read_term, read_tope};
pub use solver::{weak_orderings, Memo, Outcome, Solver, DEFAULT_CAPACITY};
pub use syntax::{Cube, CubeCtx, CubeTerm, PredDecl, Shape, Tope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopeError {
    #[error("ill-sorted cube term: {0}")]
    Sort(String),
    #[error("tope query has {found} interval variables, more than the capacity of {limit}")]
    Capacity { found: usize, limit: usize },
    #[error("{0}")]
    Mismatch(String),
}

impl TopeError {
    pub fn code(&self) -> Code {
        match self {
            TopeError::Sort(_) => Code::Sort,
            TopeError::Capacity { .. } => Code::Capacity,
            TopeError::Mismatch(_) => Code::Mismatch,
        }
    }
}

/// Entailment with a fresh solver at the default capacity.
pub fn entails(ctx: &CubeCtx, hyps: &Tope, goal: &Tope) -> Result<bool, TopeError> {
    Solver::default().entails(ctx, hyps, goal)
}

pub fn shape_included(sub: &Shape, sup: &Shape) -> Result<bool, TopeError> {
    Solver::default().shape_included(sub, sup)
}

pub fn cube_equal(ctx: &CubeCtx, hyps: &Tope, a: &CubeTerm, b: &CubeTerm) -> Result<bool, TopeError> {
    Solver::default().cube_equal(ctx, hyps, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn holds(vars: &[&str], hyps: &str, goal: &str) -> bool {
        let ctx = CubeCtx::intervals(vars);
        let h = read_tope(&ctx, hyps).unwrap();
        let g = read_tope(&ctx, goal).unwrap();
        let verdict = entails(&ctx, &h, &g).unwrap();
        assert_eq!(oracle_entails(&ctx, &h, &g).unwrap(), verdict, "{hyps} ⊢ {goal}");
        verdict
    }

    #[test]
    fn horn_included_in_triangle() {
        assert!(holds(&["t", "s"], "s ≡ 0 ∨ t ≡ 1", "s ≤ t"));
    }

    #[test]
    fn interval_is_total() {
        assert!(holds(&["x", "y"], "⊤", "x ≤ y ∨ y ≤ x"));
    }

    #[test]
    fn interval_has_interior_points() {
        assert!(!holds(&["t"], "⊤", "t ≡ 0 ∨ t ≡ 1"));
    }

    #[test]
    fn antisymmetry() {
        assert!(holds(&["x", "y"], "x ≤ y ∧ y ≤ x", "x ≡ y"));
    }

    #[test]
    fn meet_is_a_lower_bound() {
        assert!(holds(&["t", "s"], "⊤", "(t ∧ s) ≤ s"));
    }

    #[test]
    fn oracle_examples() {
        assert!(holds(&["x", "y", "z"], "x ≤ y", "(x ∧ z) ≤ (y ∨ z)"));
        assert!(holds(&["x"], "⊥", "x ≡ 1"));
        assert!(holds(&[], "0 ≡ 1", "⊥"));
    }

    fn triangle_shape(tope: &str) -> Shape {
        let ctx = CubeCtx::intervals(&["t", "s"]);
        Shape {
            vars: ctx.vars.clone(),
            tope: read_tope(&ctx, tope).unwrap(),
        }
    }

    #[test]
    fn shape_inclusions() {
        let boundary = Shape {
            vars: vec![("t".into(), Cube::Interval)],
            tope: read_tope(&CubeCtx::intervals(&["t"]), "t ≡ 0 ∨ t ≡ 1").unwrap(),
        };
        let interval = Shape {
            vars: boundary.vars.clone(),
            tope: Tope::Top,
        };
        assert!(shape_included(&boundary, &interval).unwrap());
        let horn = triangle_shape("s ≡ 0 ∨ t ≡ 1");
        let simplex = triangle_shape("s ≤ t");
        assert!(shape_included(&horn, &simplex).unwrap());
        assert!(!shape_included(&simplex, &horn).unwrap());
        assert!(shape_included(&simplex, &simplex).unwrap());
        assert!(matches!(
            shape_included(&boundary, &simplex),
            Err(TopeError::Mismatch(_))
        ));
    }

    #[test]
    fn cube_equality() {
        let ctx = CubeCtx::intervals(&["t", "s"]);
        let t = ctx.var("t").unwrap();
        let s = ctx.var("s").unwrap();
        let at_zero = read_tope(&ctx, "t ≡ 0").unwrap();
        assert!(cube_equal(&ctx, &at_zero, &t, &CubeTerm::Zero).unwrap());
        assert!(cube_equal(&ctx, &Tope::Top, &CubeTerm::meet(t.clone(), CubeTerm::One), &t).unwrap());
        assert!(!cube_equal(&ctx, &Tope::Top, &t, &s).unwrap());
    }

    #[test]
    fn products_flatten_componentwise() {
        let mut ctx = CubeCtx::new();
        ctx.push_var("p", Cube::interval_power(2));
        let h = read_tope(&ctx, "p ≡ (0, 1)").unwrap();
        let g = read_tope(&ctx, "fst p ≤ snd p").unwrap();
        assert!(entails(&ctx, &h, &g).unwrap());
        assert!(oracle_entails(&ctx, &h, &g).unwrap());
        let g = read_tope(&ctx, "snd p ≤ fst p").unwrap();
        assert!(!entails(&ctx, &Tope::Top, &g).unwrap());
    }

    #[test]
    fn sort_errors() {
        let ctx = CubeCtx::intervals(&["t", "s"]);
        let bad = read_tope(&ctx, "t ≤ (t, s)").unwrap();
        assert_eq!(entails(&ctx, &Tope::Top, &bad).unwrap_err().code(), Code::Sort);
        let bad = read_tope(&ctx, "(t, s) ≡ t").unwrap();
        assert_eq!(entails(&ctx, &Tope::Top, &bad).unwrap_err().code(), Code::Sort);
    }

    #[test]
    fn capacity_is_enforced_on_occurring_atoms() {
        let names: Vec<String> = (0..10).map(|i| format!("x{i}")).collect();
        let ctx = CubeCtx::intervals(&names);
        let few = read_tope(&ctx, "x0 ≤ x1").unwrap();
        assert!(!entails(&ctx, &Tope::Top, &few).unwrap());
        let chain = (0..9).map(|i| format!("x{i} ≤ x{}", i + 1)).collect::<Vec<_>>().join(" ∧ ");
        let many = read_tope(&ctx, &chain).unwrap();
        let err = entails(&ctx, &many, &Tope::Bot).unwrap_err();
        assert_eq!(err.code(), Code::Capacity);
        let three = read_tope(&ctx, "x0 ≤ x1 ∧ x1 ≤ x2").unwrap();
        let goal = read_tope(&ctx, "x0 ≤ x2").unwrap();
        assert_eq!(Solver::new(2).entails(&ctx, &three, &goal).unwrap_err().code(), Code::Capacity);
        assert!(Solver::new(3).entails(&ctx, &three, &goal).unwrap());
    }

    #[test]
    fn abstract_cubes_and_families() {
        let mut ctx = CubeCtx::new();
        ctx.sorts.push("J".into());
        let j = Cube::Abstract(0);
        ctx.preds.push(PredDecl { name: "ψ".into(), domain: j.clone(), bound: None });
        ctx.preds.push(PredDecl {
            name: "φ".into(),
            domain: j.clone(),
            bound: Some(Tope::Pred(0, CubeTerm::Arg)),
        });
        let x = ctx.push_var("x", j.clone());
        let y = ctx.push_var("y", j);
        let phi_x = Tope::Pred(1, x.clone());
        let psi_x = Tope::Pred(0, x.clone());
        let psi_y = Tope::Pred(0, y.clone());
        assert!(entails(&ctx, &phi_x, &psi_x).unwrap());
        assert!(!entails(&ctx, &psi_x, &phi_x).unwrap());
        assert!(!entails(&ctx, &psi_x, &psi_y).unwrap());
        let same = Tope::and(Tope::Eq(x, y), psi_x);
        assert!(entails(&ctx, &same, &psi_y).unwrap());
    }

    #[test]
    fn memo_is_keyed_up_to_renaming() {
        let solver = Solver::default().with_trace();
        let a = CubeCtx::intervals(&["t", "s"]);
        let b = CubeCtx::intervals(&["u", "v"]);
        let q = |ctx: &CubeCtx| read_tope(ctx, &format!("{} ≤ {}", ctx.vars[1].0, ctx.vars[0].0)).unwrap();
        solver.entails(&a, &Tope::Top, &q(&a)).unwrap();
        assert_eq!(solver.memo().len(), 1);
        solver.entails(&b, &Tope::Top, &q(&b)).unwrap();
        assert_eq!(solver.memo().len(), 1);
        assert_eq!(solver.queries(), 2);
        let trace = solver.take_trace();
        assert_eq!(trace[0], "ENTAILS t : I, s : I |- ⊤ => s ≤ t : false (branches=4)");
        assert_eq!(trace[1], "ENTAILS u : I, v : I |- ⊤ => v ≤ u : false (branches=4)");
    }
}
