//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stt_core::corpus::{corpus_manifest, parse_header, Tier};
use stt_core::driver::{self, RunConfig};
use stt_core::surface::ast::DeclKind;
use stt_core::surface::parser::{parse_expr, parse_source};
use stt_core::surface::print::{print_expr, print_module};
use stt_core::surface::{alpha_eq, module_alpha_eq, ExprKind};
use stt_core::tope::{oracle_entails, read_tope, CubeCtx, Shape, Solver, Tope};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Solver versus oracle on random entailment queries.
fn criterion_1() -> Outcome {
    const QUERIES: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC1);
    let solver = Solver::new(8);
    let start = Instant::now();
    let mut valid = 0;
    for i in 0..QUERIES {
        let q = common::random_query(&mut rng);
        let got = solver.entails(&q.ctx, &q.hyps, &q.goal).map_err(|e| format!("query {i}: {e}"))?;
        let want = oracle_entails(&q.ctx, &q.hyps, &q.goal).map_err(|e| format!("query {i}: {e}"))?;
        ensure(got == want, || {
            format!(
                "query {i} disagrees: {} ⊢ {} (solver {got}, oracle {want})",
                q.ctx.show_tope(&q.hyps),
                q.ctx.show_tope(&q.goal)
            )
        })?;
        valid += usize::from(got);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{QUERIES} queries agree ({valid} valid) in {:.1}s", elapsed.as_secs_f64()))
}

/// Tope axioms, lattice identities and the named shape inclusions.
fn criterion_2() -> Outcome {
    let ctx = CubeCtx::intervals(&["x", "y", "z"]);
    let solver = Solver::new(8);
    let mut checked = 0;
    let mut judge = |hyps: &str, goal: &str, expect: bool| -> Result<(), String> {
        let h = read_tope(&ctx, hyps).map_err(|e| format!("{hyps}: {e}"))?;
        let g = read_tope(&ctx, goal).map_err(|e| format!("{goal}: {e}"))?;
        let got = solver.entails(&ctx, &h, &g).map_err(|e| e.to_string())?;
        let oracle = oracle_entails(&ctx, &h, &g).map_err(|e| e.to_string())?;
        checked += 1;
        ensure(got == expect && oracle == expect, || {
            format!("{hyps} ⊢ {goal}: expected {expect}, solver {got}, oracle {oracle}")
        })
    };
    judge("⊤", "x ≤ x", true)?;
    judge("x ≤ y ∧ y ≤ z", "x ≤ z", true)?;
    judge("x ≤ y ∧ y ≤ x", "x ≡ y", true)?;
    judge("⊤", "x ≤ y ∨ y ≤ x", true)?;
    judge("⊤", "0 ≤ x", true)?;
    judge("⊤", "x ≤ 1", true)?;
    judge("0 ≡ 1", "⊥", true)?;
    judge("⊤", "x ≤ y", false)?;
    judge("⊤", "⊥", false)?;
    judge("x ≤ y", "y ≤ x", false)?;
    let identities = [
        ("x ∧ x", "x"),
        ("x ∨ x", "x"),
        ("x ∧ y", "y ∧ x"),
        ("x ∨ y", "y ∨ x"),
        ("x ∧ (y ∧ z)", "(x ∧ y) ∧ z"),
        ("x ∨ (y ∨ z)", "(x ∨ y) ∨ z"),
        ("x ∧ (x ∨ y)", "x"),
        ("x ∨ (x ∧ y)", "x"),
        ("x ∧ (y ∨ z)", "(x ∧ y) ∨ (x ∧ z)"),
        ("x ∨ (y ∧ z)", "(x ∨ y) ∧ (x ∨ z)"),
        ("x ∧ 1", "x"),
        ("x ∨ 0", "x"),
    ];
    for (l, r) in identities {
        judge("⊤", &format!("({l}) ≡ ({r})"), true)?;
    }
    let tope_identities = [
        ("x ≤ y ∧ y ≤ z", "y ≤ z ∧ x ≤ y"),
        ("x ≤ y ∨ y ≤ z", "y ≤ z ∨ x ≤ y"),
        ("x ≤ y ∧ (y ≤ z ∨ x ≡ 0)", "(x ≤ y ∧ y ≤ z) ∨ (x ≤ y ∧ x ≡ 0)"),
        ("x ≤ y ∨ (y ≤ z ∧ x ≡ 0)", "(x ≤ y ∨ y ≤ z) ∧ (x ≤ y ∨ x ≡ 0)"),
    ];
    for (l, r) in tope_identities {
        judge(l, r, true)?;
        judge(r, l, true)?;
    }

    let shape = |names: &[&str], tope: &str| -> Shape {
        let ctx = CubeCtx::intervals(names);
        Shape {
            vars: ctx.vars.clone(),
            tope: if tope == "⊤" { Tope::Top } else { read_tope(&ctx, tope).unwrap() },
        }
    };
    let d1 = shape(&["t"], "⊤");
    let bd1 = shape(&["t"], "t ≡ 0 ∨ t ≡ 1");
    let d2 = shape(&["t", "s"], "s ≤ t");
    let horn = shape(&["t", "s"], "s ≡ 0 ∨ t ≡ 1");
    let bd2 = shape(&["t", "s"], "s ≡ t ∨ s ≡ 0 ∨ t ≡ 1");
    let inclusions = [
        ("∂Δ¹ ⊆ Δ¹", &bd1, &d1, true),
        ("Δ¹ ⊆ ∂Δ¹", &d1, &bd1, false),
        ("Λ²₁ ⊆ Δ²", &horn, &d2, true),
        ("Δ² ⊆ Λ²₁", &d2, &horn, false),
        ("∂Δ² ⊆ Δ²", &bd2, &d2, true),
        ("Δ² ⊆ ∂Δ²", &d2, &bd2, false),
    ];
    for (name, sub, sup, expect) in inclusions {
        let got = solver.shape_included(sub, sup).map_err(|e| e.to_string())?;
        ensure(got == expect, || format!("{name}: expected {expect}, got {got}"))?;
    }
    Ok(format!("{checked} entailments and 6 shape inclusions"))
}

/// Golden judgmental-equality suite.
fn criterion_3() -> Outcome {
    let first = common::run_golden();
    ensure(first.verdicts.len() >= 30, || format!("only {} cases", first.verdicts.len()))?;
    for (name, expect, actual) in &first.verdicts {
        ensure(expect == actual, || format!("{name}: expected {expect}, got {actual}"))?;
    }
    let second = common::run_golden();
    ensure(first.output == second.output, || "trace differs between runs".into())?;
    let golden = fs::read_to_string(common::crate_dir().join(common::GOLDEN_TRACE)).map_err(|e| e.to_string())?;
    ensure(first.output == golden, || "trace differs from the golden file".into())?;
    Ok(format!("{} cases, trace byte-identical", first.verdicts.len()))
}

/// Full corpus check through the command-line driver.
fn criterion_4() -> Outcome {
    let units = corpus_manifest();
    ensure(units.len() >= 13, || format!("only {} units", units.len()))?;
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let all = common::corpus_dir().join("all.stt");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_stt"))
        .args(["check", "--no-cache"])
        .arg(&all)
        .current_dir(scratch.path())
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), || format!("exit {:?}\n{stdout}", out.status.code()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;

    let mut decls: BTreeMap<String, (String, DeclKind, bool, bool)> = BTreeMap::new();
    for u in &units {
        let name = u.name();
        let src = fs::read_to_string(common::corpus_dir().join(&u.file)).map_err(|e| e.to_string())?;
        ensure(parse_header(&src).tier == Some(u.tier), || format!("{name}: tier mismatch"))?;
        let (m, _) = parse_source(&u.file, &src);
        for d in m.declarations {
            let is_statement = matches!(d.stated_type.kind, ExprKind::Universe(1));
            decls.insert(d.name.clone(), (name.clone(), d.kind, d.body.is_some(), is_statement));
        }
    }
    for proved in ["axiom_of_choice_equiv", "ext_characterization_equiv"] {
        let (unit, kind, body, _) = decls.get(proved).ok_or(format!("{proved} missing"))?;
        ensure(*kind == DeclKind::Definition && *body, || format!("{proved} is not proved"))?;
        ensure(units.iter().any(|u| &u.name() == unit && u.tier == Tier::T1), || format!("{proved} is not in a T1 unit"))?;
    }
    let statements = [
        "chevalley_lari",
        "chevalley_fibered",
        "cocart_closure",
        "cocart_fun_mate_char",
        "cov_is_inner",
        "directed_encode_decode",
        "yoneda",
        "dep_yoneda",
        "yoneda_cov",
        "dep_yoneda_cov",
    ];
    for s in statements {
        let (_, _, body, is_statement) = decls.get(s).ok_or(format!("{s} missing"))?;
        ensure(*body && *is_statement, || format!("{s} is not stated as a type"))?;
    }
    Ok(format!(
        "{} units, exit 0 in {:.1}s, {} statements present",
        units.len(),
        elapsed.as_secs_f64(),
        statements.len()
    ))
}

/// Seeded-error corpus variants.
fn criterion_5() -> Outcome {
    let variants = common::negative_variants();
    ensure(variants.len() >= 10, || format!("only {} variants", variants.len()))?;
    for v in &variants {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        common::materialize(v, dir.path());
        let run = common::check_target(
            dir.path(),
            v.target,
            RunConfig {
                no_cache: true,
                ..RunConfig::default()
            },
        );
        ensure(run.exit == v.exit && run.codes == v.codes, || {
            format!("{}: expected exit {} {:?}, got exit {} {:?}", v.name, v.exit, v.codes, run.exit, run.codes)
        })?;
    }
    Ok(format!("{} variants", variants.len()))
}

/// Parser round trip on the corpus and on random trees.
fn criterion_6() -> Outcome {
    let files = common::corpus_files();
    for path in &files {
        let src = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let (m, errs) = parse_source(path, &src);
        ensure(errs.is_empty(), || format!("{}: does not parse", path.display()))?;
        let (again, errs) = parse_source(path, &print_module(&m));
        ensure(errs.is_empty() && module_alpha_eq(&m, &again), || {
            format!("{}: round trip changes the module", path.display())
        })?;
    }
    const TREES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC6);
    for i in 0..TREES {
        let e = common::random_expr(&mut rng, 5);
        let printed = print_expr(&e);
        let (again, _) = parse_expr(&printed).map_err(|_| format!("tree {i}: `{printed}` does not parse"))?;
        ensure(alpha_eq(&e, &again), || format!("tree {i}: `{printed}` reparses differently"))?;
    }
    Ok(format!("{} corpus files and {TREES} random trees", files.len()))
}

fn run_all(dir: &Path, cache_dir: &Path, no_cache: bool) -> (i32, String) {
    let config = RunConfig {
        targets: vec![dir.join("all.stt")],
        search_paths: vec![dir.to_owned()],
        no_cache,
        cache_dir: cache_dir.to_owned(),
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..RunConfig::default()
    };
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = driver::run_with(&config, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

/// Cached and fresh runs agree on randomized single-file mutations.
fn criterion_7() -> Outcome {
    const TRIALS: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC7);
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut failing = 0;
    for trial in 0..TRIALS {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for f in common::corpus_files() {
            fs::copy(&f, dir.path().join(f.file_name().unwrap())).map_err(|e| e.to_string())?;
        }
        let what = common::mutate_one(&mut rng, dir.path());
        let cached = run_all(dir.path(), cache.path(), false);
        let fresh = run_all(dir.path(), cache.path(), true);
        ensure(cached.0 == fresh.0, || {
            format!("trial {trial} ({what}): cached exit {} but fresh exit {}", cached.0, fresh.0)
        })?;
        ensure(cached.1 == fresh.1, || format!("trial {trial} ({what}): cached report differs"))?;
        failing += usize::from(fresh.0 != 0);
    }
    Ok(format!("{TRIALS} mutations ({failing} failing), cached = fresh"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("tope solver agrees with oracle", criterion_1),
        ("tope axiom suite", criterion_2),
        ("judgmental-equality golden suite", criterion_3),
        ("corpus check", criterion_4),
        ("negative corpus", criterion_5),
        ("parser round trip", criterion_6),
        ("cache soundness", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
