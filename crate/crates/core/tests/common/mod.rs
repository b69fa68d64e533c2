//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use stt_core::driver::{self, RunConfig};
use stt_core::surface::ast::{Binder, LamBinder, Pattern};
use stt_core::surface::{Expr, ExprKind};
use stt_core::tope::{CubeCtx, CubeTerm, Tope};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_dir() -> PathBuf {
    crate_dir().join("../../corpus").canonicalize().expect("corpus directory")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "stt"))
        .collect();
    files.sort();
    files
}

// ---------------------------------------------------------------------------
// Golden judgmental-equality suite

pub const GOLDEN_DIR: &str = "tests/golden/cases";
pub const GOLDEN_TRACE: &str = "tests/golden/judgmental.trace";

pub struct GoldenCase {
    pub name: String,
    pub path: PathBuf,
    /// `ok` or the code of the first error.
    pub expect: String,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let mut cases: Vec<GoldenCase> = fs::read_dir(crate_dir().join(GOLDEN_DIR))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "stt"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_str().unwrap().to_owned();
            let src = fs::read_to_string(&p).unwrap();
            let expect = src
                .lines()
                .find_map(|l| l.strip_prefix("-- expect: "))
                .unwrap_or_else(|| panic!("{name}: missing `-- expect:` line"))
                .trim()
                .to_owned();
            GoldenCase {
                name,
                path: PathBuf::from(GOLDEN_DIR).join(p.file_name().unwrap()),
                expect,
            }
        })
        .collect();
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    cases
}

pub struct GoldenRun {
    /// `(case, expected, actual)` in name order.
    pub verdicts: Vec<(String, String, String)>,
    /// Solver traces followed by the report, as the CLI would print them.
    pub output: String,
}

/// Check every golden case in one jobs=1 run with solver tracing on.
pub fn run_golden() -> GoldenRun {
    let cases = golden_cases();
    let config = RunConfig {
        targets: cases.iter().map(|c| c.path.clone()).collect(),
        search_paths: vec![PathBuf::from(GOLDEN_DIR)],
        trace_tope: true,
        jobs: 1,
        no_cache: true,
        ..RunConfig::default()
    };
    let outcome = driver::execute(&config).expect("golden cases resolve");
    let mut out = Vec::new();
    let mut err = Vec::new();
    driver::render(&config, &outcome, &mut out, &mut err).unwrap();
    let verdicts = cases
        .iter()
        .map(|c| {
            let report = &outcome.results[&c.name].report;
            let actual = match report.errors().next() {
                None => "ok".to_owned(),
                Some(d) => d.code.as_str().to_owned(),
            };
            (c.name.clone(), c.expect.clone(), actual)
        })
        .collect();
    GoldenRun {
        verdicts,
        output: String::from_utf8(err).unwrap() + &String::from_utf8(out).unwrap(),
    }
}

// ---------------------------------------------------------------------------
// Random tope entailment queries

pub fn random_cube_term<R: Rng>(rng: &mut R, nvars: usize, depth: usize) -> CubeTerm {
    if depth == 0 || rng.gen_bool(0.6) {
        return match rng.gen_range(0..6) {
            0 => CubeTerm::Zero,
            1 => CubeTerm::One,
            _ => CubeTerm::Var(rng.gen_range(0..nvars)),
        };
    }
    let a = random_cube_term(rng, nvars, depth - 1);
    let b = random_cube_term(rng, nvars, depth - 1);
    if rng.gen_bool(0.5) {
        CubeTerm::meet(a, b)
    } else {
        CubeTerm::join(a, b)
    }
}

/// A random tope over `nvars` interval variables, at most `depth` deep.
pub fn random_tope<R: Rng>(rng: &mut R, nvars: usize, depth: usize) -> Tope {
    if depth <= 1 || rng.gen_bool(0.3) {
        let term_depth = depth.saturating_sub(1).min(2);
        return match rng.gen_range(0..10) {
            0 => Tope::Top,
            1 => Tope::Bot,
            2..=5 => Tope::Leq(random_cube_term(rng, nvars, term_depth), random_cube_term(rng, nvars, term_depth)),
            _ => Tope::Eq(random_cube_term(rng, nvars, term_depth), random_cube_term(rng, nvars, term_depth)),
        };
    }
    let a = Box::new(random_tope(rng, nvars, depth - 1));
    let b = Box::new(random_tope(rng, nvars, depth - 1));
    if rng.gen_bool(0.5) {
        Tope::And(a, b)
    } else {
        Tope::Or(a, b)
    }
}

pub struct Query {
    pub ctx: CubeCtx,
    pub hyps: Tope,
    pub goal: Tope,
}

/// An entailment query with 1 to 4 interval variables and topes of depth at most 5.
pub fn random_query<R: Rng>(rng: &mut R) -> Query {
    let nvars = rng.gen_range(1..=4);
    let names: Vec<String> = (0..nvars).map(|i| format!("t{i}")).collect();
    let (hd, gd) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    Query {
        ctx: CubeCtx::intervals(&names),
        hyps: random_tope(rng, nvars, hd),
        goal: random_tope(rng, nvars, gd),
    }
}

// ---------------------------------------------------------------------------
// Random surface syntax trees

const NAMES: &[&str] = &["x", "y", "z", "f", "g", "A", "B", "t", "s", "a′", "σ", "Λ²₁"];

fn node(kind: ExprKind) -> Expr {
    Expr { id: 0, kind }
}

fn boxed(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn random_pattern<R: Rng>(rng: &mut R, depth: usize) -> Pattern {
    match rng.gen_range(0..if depth == 0 { 5 } else { 6 }) {
        0 => Pattern::Wildcard,
        1..=4 => Pattern::Var((*NAMES.choose(rng).unwrap()).to_owned()),
        _ => Pattern::Pair(
            Box::new(random_pattern(rng, depth - 1)),
            Box::new(random_pattern(rng, depth - 1)),
        ),
    }
}

fn random_binder<R: Rng>(rng: &mut R, depth: usize, max_patterns: usize) -> Binder {
    let n = rng.gen_range(1..=max_patterns);
    Binder {
        patterns: (0..n).map(|_| random_pattern(rng, 1)).collect(),
        ty: random_expr(rng, depth),
    }
}

fn random_binders<R: Rng>(rng: &mut R, depth: usize) -> Vec<Binder> {
    (0..rng.gen_range(1..=2)).map(|_| random_binder(rng, depth, 2)).collect()
}

fn leaf<R: Rng>(rng: &mut R) -> Expr {
    use ExprKind as K;
    node(match rng.gen_range(0..16) {
        0 => K::Universe(rng.gen_range(0..3)),
        1 => K::Interval,
        2 => K::CubeKw,
        3 => K::TopeKw,
        4 => K::UnitCube,
        5 => K::Star,
        6 => K::Zero,
        7 => K::One,
        8 => K::Top,
        9 => K::Bot,
        10 => K::RecBot,
        11 => K::Refl(None),
        _ => K::Var((*NAMES.choose(rng).unwrap()).to_owned()),
    })
}

/// A random expression tree of the given depth. Node ids are all zero.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    use ExprKind as K;
    if depth == 0 || rng.gen_bool(0.15) {
        return leaf(rng);
    }
    let d = depth - 1;
    let sub = |rng: &mut R| boxed(random_expr(rng, d));
    let kind = match rng.gen_range(0..24) {
        0 => K::Lambda(
            (0..rng.gen_range(1..=2))
                .map(|_| LamBinder {
                    pattern: random_pattern(rng, 1),
                    ty: rng.gen_bool(0.4).then(|| random_expr(rng, d)),
                })
                .collect(),
            sub(rng),
        ),
        1 => K::Pi(random_binders(rng, d), sub(rng)),
        2 => K::Arrow(sub(rng), sub(rng)),
        3 => K::Sigma(random_binders(rng, d), sub(rng)),
        4 => K::Product(sub(rng), sub(rng)),
        5 | 6 => K::App(sub(rng), sub(rng)),
        7 => K::Pair(sub(rng), sub(rng)),
        8 => K::Fst(sub(rng)),
        9 => K::Snd(sub(rng)),
        10 => K::PathType(rng.gen_bool(0.5).then(|| sub(rng)), sub(rng), sub(rng)),
        11 => K::Refl(Some(sub(rng))),
        12 => K::J(sub(rng), sub(rng), sub(rng)),
        13 => K::Extension {
            binder: Box::new(random_binder(rng, d, 1)),
            family: sub(rng),
            subtope: sub(rng),
            partial: sub(rng),
        },
        14 => K::Shape {
            pattern: random_pattern(rng, 1),
            cube: sub(rng),
            tope: sub(rng),
        },
        15 => K::RecOr(
            (0..rng.gen_range(2..=3))
                .map(|_| (random_expr(rng, d), random_expr(rng, d)))
                .collect(),
        ),
        16 => K::TopeEq(sub(rng), sub(rng)),
        17 => K::Leq(sub(rng), sub(rng)),
        18 => K::And(sub(rng), sub(rng)),
        19 => K::Or(sub(rng), sub(rng)),
        20 => K::Ann(sub(rng), sub(rng)),
        _ => return leaf(rng),
    };
    node(kind)
}

// ---------------------------------------------------------------------------
// Seeded-error corpus variants

pub enum Edit {
    Append(&'static str),
    Prepend(&'static str),
}

pub struct Variant {
    pub name: &'static str,
    pub edits: Vec<(&'static str, Edit)>,
    /// Unit whose file is checked.
    pub target: &'static str,
    /// Error codes expected across the whole run, sorted.
    pub codes: Vec<&'static str>,
    pub exit: i32,
}

pub fn negative_variants() -> Vec<Variant> {
    use Edit::*;
    vec![
        Variant {
            name: "arrow with the wrong target boundary",
            edits: vec![("hom", Append("def bad_arr (A : U) (x y : A) : hom A x y := λ t . x;\n"))],
            target: "hom",
            codes: vec!["CHECK"],
            exit: 1,
        },
        Variant {
            name: "triangle with a mismatched edge",
            edits: vec![(
                "hom",
                Append("def bad_tri (A : U) (x y : A) (f : hom A x y) : hom2 A x x y (id_arr A x) f (id_arr A y) := λ (t, s) . f t;\n"),
            )],
            target: "hom",
            codes: vec!["CHECK"],
            exit: 1,
        },
        Variant {
            name: "composite landing at the wrong endpoint",
            edits: vec![(
                "segal_rezk",
                Append("def bad_comp (A : U) (x y : A) (f : hom A x y) : hom A x x := λ t . f t;\n"),
            )],
            target: "segal_rezk",
            codes: vec!["CHECK"],
            exit: 1,
        },
        Variant {
            name: "recOR branches disagreeing on an overlap",
            edits: vec![(
                "shapes",
                Append("def bad_glue (A : U) (a b : A) : Π (t : ∂Δ¹) → A := λ t . recOR(t ≡ 0 ↦ a, t ≤ 0 ↦ b, t ≡ 1 ↦ a);\n"),
            )],
            target: "shapes",
            codes: vec!["CHECK"],
            exit: 1,
        },
        Variant {
            name: "tope comparing a cube variable with a type",
            edits: vec![("shapes", Append("def bad_shape : I → TOPE := λ t . t ≡ U;\n"))],
            target: "shapes",
            codes: vec!["SORT"],
            exit: 1,
        },
        Variant {
            name: "tope comparing a point with a pair",
            edits: vec![("shapes", Append("def bad_shape2 : I × I → TOPE := λ (t, s) . t ≤ (t, s);\n"))],
            target: "shapes",
            codes: vec!["SORT"],
            exit: 1,
        },
        Variant {
            name: "extension subtope over a term variable",
            edits: vec![("prelude", Append("def bad_ext (A : U) (a : A) : U := ⟨Π (t : I) → A | a ≡ 0 ↦ a⟩;\n"))],
            target: "prelude",
            codes: vec!["SORT"],
            exit: 1,
        },
        Variant {
            name: "stray postulate in a T1 unit",
            edits: vec![("prelude", Append("postulate cheat : Π (A : U) → A;\n"))],
            target: "prelude",
            codes: vec!["TIER"],
            exit: 1,
        },
        Variant {
            name: "T1 unit using a postulate from a T2 unit",
            edits: vec![
                ("orthogonality", Append("postulate stray : U;\n")),
                ("inner", Append("def uses_stray : U := stray;\n")),
            ],
            target: "inner",
            codes: vec!["TIER"],
            exit: 1,
        },
        Variant {
            name: "stray postulate in the cocartesian unit",
            edits: vec![("cocart", Append("postulate all_cocart : Π (B : U) → Π (P : B → U) → isCocartFam B P;\n"))],
            target: "cocart",
            codes: vec!["TIER"],
            exit: 1,
        },
        Variant {
            name: "two-unit import cycle",
            edits: vec![("shapes", Prepend("import hom;\n"))],
            target: "hom",
            codes: vec!["IMPORT"],
            exit: 2,
        },
        Variant {
            name: "long import cycle through the whole corpus",
            edits: vec![("prelude", Prepend("import yoneda;\n"))],
            target: "yoneda",
            codes: vec!["IMPORT"],
            exit: 2,
        },
        Variant {
            name: "self import",
            edits: vec![("hom", Prepend("import hom;\n"))],
            target: "hom",
            codes: vec!["IMPORT"],
            exit: 2,
        },
        Variant {
            name: "import of a missing unit",
            edits: vec![("lari", Prepend("import lari_missing;\n"))],
            target: "lari",
            codes: vec!["IMPORT"],
            exit: 2,
        },
    ]
}

/// Copy the corpus into `dir` and apply the variant's edits.
pub fn materialize(variant: &Variant, dir: &Path) {
    for f in corpus_files() {
        fs::copy(&f, dir.join(f.file_name().unwrap())).unwrap();
    }
    for (unit, edit) in &variant.edits {
        let path = dir.join(format!("{unit}.stt"));
        let src = fs::read_to_string(&path).unwrap();
        let new = match edit {
            Edit::Append(s) => format!("{src}{s}"),
            Edit::Prepend(s) => format!("{s}{src}"),
        };
        fs::write(&path, new).unwrap();
    }
}

pub struct RunSummary {
    pub exit: i32,
    /// Error codes across all modules and resolution errors, sorted.
    pub codes: Vec<String>,
}

pub fn check_target(dir: &Path, target: &str, config: RunConfig) -> RunSummary {
    let config = RunConfig {
        targets: vec![dir.join(format!("{target}.stt"))],
        search_paths: vec![dir.to_owned()],
        ..config
    };
    match driver::execute(&config) {
        Err(failure) => {
            let mut codes: Vec<String> = failure.errors.iter().map(|e| e.diagnostic.code.as_str().to_owned()).collect();
            codes.sort();
            RunSummary {
                exit: driver::EXIT_USAGE,
                codes,
            }
        }
        Ok(outcome) => {
            let mut codes: Vec<String> = outcome
                .results
                .values()
                .flat_map(|r| r.report.errors().map(|d| d.code.as_str().to_owned()).collect::<Vec<_>>())
                .collect();
            codes.sort();
            RunSummary {
                exit: outcome.exit_code(),
                codes,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Random single-file corpus mutations

/// Mutate one corpus file in place. Mutations range from semantically
/// neutral (comments, whitespace) to breaking (dropped or swapped tokens).
pub fn mutate_one<R: Rng>(rng: &mut R, dir: &Path) -> String {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "stt"))
        .collect();
    files.sort();
    let path = files.choose(rng).unwrap().clone();
    let src = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = src.lines().collect();
    let i = rng.gen_range(0..lines.len());
    let mut out: Vec<String> = lines.iter().map(|l| (*l).to_owned()).collect();
    let what = match rng.gen_range(0..6) {
        0 => {
            out.insert(i, "-- touched".to_owned());
            "comment"
        }
        1 => {
            out[i] = format!("{}  ", out[i]);
            "whitespace"
        }
        2 => {
            out.remove(i);
            "drop line"
        }
        3 => {
            let words: Vec<&str> = lines[i].split(' ').collect();
            if words.len() > 1 {
                let k = rng.gen_range(0..words.len());
                out[i] = words.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, w)| *w).collect::<Vec<_>>().join(" ");
            }
            "drop word"
        }
        4 => {
            out[i] = out[i].replace(" 0", " 1");
            "swap endpoint"
        }
        _ => {
            out.push("def extra_mutation_def : U1 := U;".to_owned());
            "append definition"
        }
    };
    fs::write(&path, out.join("\n") + "\n").unwrap();
    format!("{}: {what} at line {}", path.file_name().unwrap().to_string_lossy(), i + 1)
}
