mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stt_core::tope::{oracle_entails, read_tope, CubeCtx, Solver, Tope};

#[test]
fn solver_agrees_with_oracle_on_random_queries() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let solver = Solver::new(8);
    let mut valid = 0;
    let start = std::time::Instant::now();
    for _ in 0..20_000 {
        let q = common::random_query(&mut rng);
        let got = solver.entails(&q.ctx, &q.hyps, &q.goal).unwrap();
        let want = oracle_entails(&q.ctx, &q.hyps, &q.goal).unwrap();
        assert_eq!(got, want, "{} ⊢ {}", q.ctx.show_tope(&q.hyps), q.ctx.show_tope(&q.goal));
        valid += usize::from(got);
    }
    eprintln!("20000 queries, {valid} valid, {:?}", start.elapsed());
    assert!(valid > 2_000 && valid < 18_000, "query distribution is degenerate: {valid} valid");
}

fn tope(ctx: &CubeCtx, s: &str) -> Tope {
    read_tope(ctx, s).unwrap()
}

#[test]
fn entailment_is_monotone_in_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let solver = Solver::new(8);
    for _ in 0..2_000 {
        let q = common::random_query(&mut rng);
        let extra = common::random_tope(&mut rng, q.ctx.vars.len(), 2);
        if solver.entails(&q.ctx, &q.hyps, &q.goal).unwrap() {
            let stronger = Tope::and(q.hyps.clone(), extra);
            assert!(solver.entails(&q.ctx, &stronger, &q.goal).unwrap());
        }
    }
}

#[test]
fn memo_does_not_change_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shared = Solver::new(8);
    for _ in 0..2_000 {
        let q = common::random_query(&mut rng);
        let fresh = Solver::new(8).entails(&q.ctx, &q.hyps, &q.goal).unwrap();
        assert_eq!(shared.entails(&q.ctx, &q.hyps, &q.goal).unwrap(), fresh);
        assert_eq!(shared.entails(&q.ctx, &q.hyps, &q.goal).unwrap(), fresh);
    }
}

#[test]
fn capacity_bound_is_reported() {
    let names: Vec<String> = (0..9).map(|i| format!("t{i}")).collect();
    let ctx = CubeCtx::intervals(&names);
    let chain: Vec<String> = (0..8).map(|i| format!("t{i} ≤ t{}", i + 1)).collect();
    let goal = tope(&ctx, &chain.join(" ∧ "));
    let err = Solver::new(8).entails(&ctx, &Tope::Top, &goal).unwrap_err();
    assert_eq!(err.code().as_str(), "CAPACITY");
}
