mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stt"))
        .args(args)
        .current_dir(dir)
        .env_remove("STT_PATH")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn corpus_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for f in common::corpus_files() {
        fs::copy(&f, dir.path().join(f.file_name().unwrap())).unwrap();
    }
    dir
}

#[test]
fn shipped_corpus_checks() {
    let dir = tempfile::tempdir().unwrap();
    let all = common::corpus_dir().join("all.stt");
    let o = stt(dir.path(), &["check", "--no-cache", all.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("16 ok, 0 failed"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("good.stt"), "def id (A : U) (a : A) : A := a;\n").unwrap();
    fs::write(p.join("bad.stt"), "def bad (A : U) (a b : A) : a =_{A} b := refl;\n").unwrap();
    fs::write(p.join("lex.stt"), "def x : U := $;\n").unwrap();
    fs::write(p.join("parse.stt"), "def x : U := ;\n").unwrap();
    fs::write(p.join("cyc_a.stt"), "import cyc_b;\n").unwrap();
    fs::write(p.join("cyc_b.stt"), "import cyc_a;\n").unwrap();
    fs::write(p.join("dangling.stt"), "import nowhere;\n").unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["good.stt"], 0),
        (&["check", "good.stt"], 0),
        (&["bad.stt"], 1),
        (&["good.stt", "bad.stt"], 1),
        (&["lex.stt"], 1),
        (&["parse.stt"], 1),
        (&["missing.stt"], 2),
        (&["cyc_a.stt"], 2),
        (&["dangling.stt"], 2),
        (&[], 2),
        (&["--jobs", "0", "good.stt"], 2),
        (&["--capacity", "0", "good.stt"], 2),
        (&["--bogus", "good.stt"], 2),
    ];
    for (args, want) in cases {
        let mut a: Vec<&str> = args.to_vec();
        let at = usize::from(a.first() == Some(&"check"));
        a.insert(at, "--no-cache");
        let o = stt(p, &a);
        assert_eq!(code(&o), *want, "stt {a:?}\n{}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn one_error_renders_one_diagnostic_with_a_caret() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.stt"), "def bad (A : U) (a b : A) : a =_{A} b := refl;\n").unwrap();
    let o = stt(dir.path(), &["--no-cache", "bad.stt"]);
    let out = stdout(&o);
    assert_eq!(out.matches("error[").count(), 1, "{out}");
    assert!(out.contains("error[CHECK]"));
    assert!(out.contains("--> bad.stt:1:"));
    assert!(out.contains('^'));
}

#[test]
fn resolution_errors_go_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = stt(dir.path(), &["--no-cache", "missing.stt"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("IMPORT"), "{}", stderr(&o));
}

#[test]
fn json_output_schema() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("dep.stt"), "def id (A : U) (a : A) : A := a;\n").unwrap();
    fs::write(
        dir.path().join("top.stt"),
        "import dep;\ndef bad (A : U) (a b : A) : a =_{A} b := refl;\n",
    )
    .unwrap();
    let o = stt(dir.path(), &["--no-cache", "--json", "top.stt"]);
    assert_eq!(code(&o), 1);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["module"], "dep");
    assert_eq!(lines[0]["status"], "ok");
    assert_eq!(lines[1]["module"], "top");
    assert_eq!(lines[1]["status"], "failed");
    let d = &lines[1]["diagnostics"][0];
    assert_eq!(d["code"], "CHECK");
    assert_eq!(d["severity"], "error");
    assert!(d["message"].is_string());
    assert_eq!(d["span"]["file"], "top.stt");
    assert!(d["span"]["start"].as_u64().unwrap() < d["span"]["end"].as_u64().unwrap());
    assert!(lines[1]["stats"].is_object());
}

#[test]
fn output_is_deterministic() {
    let dir = corpus_copy();
    let p = dir.path();
    fs::write(p.join("broken.stt"), "import hom;\ndef bad (A : U) (x y : A) : hom A x y := λ t . x;\ndef also (A : U) : A := A;\n").unwrap();
    let args = ["--no-cache", "--jobs", "1", "all.stt", "broken.stt"];
    let first = stt(p, &args);
    let second = stt(p, &args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(code(&first), 1);
    let parallel = stt(p, &["--no-cache", "--jobs", "4", "all.stt", "broken.stt"]);
    assert_eq!(first.stdout, parallel.stdout);
    let json = stt(p, &["--no-cache", "--json", "--jobs", "4", "all.stt", "broken.stt"]);
    let modules: Vec<String> = stdout(&json)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["module"].as_str().unwrap().to_owned())
        .collect();
    let mut sorted = modules.clone();
    sorted.sort();
    assert_eq!(modules, sorted);
}

fn cache_counts(o: &Output) -> (usize, usize) {
    let err = stderr(o);
    let line = err.lines().find(|l| l.starts_with("cache: ")).unwrap_or_else(|| panic!("{err}"));
    let nums: Vec<usize> = line
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().unwrap())
        .collect();
    (nums[0], nums[1])
}

#[test]
fn cache_hits_and_invalidation() {
    let dir = corpus_copy();
    let p = dir.path();
    let first = stt(p, &["all.stt"]);
    assert_eq!(code(&first), 0);
    assert_eq!(cache_counts(&first), (0, 16));
    let second = stt(p, &["all.stt"]);
    assert_eq!(code(&second), 0);
    assert_eq!(cache_counts(&second), (16, 0));
    assert_eq!(first.stdout, second.stdout);

    // segal_rezk is imported by 11 of the 16 modules, itself included.
    let src = fs::read_to_string(p.join("segal_rezk.stt")).unwrap();
    fs::write(p.join("segal_rezk.stt"), format!("{src}\n-- touched\n")).unwrap();
    let third = stt(p, &["all.stt"]);
    assert_eq!(cache_counts(&third), (5, 11));

    let none = stt(p, &["--no-cache", "all.stt"]);
    assert!(!stderr(&none).contains("cache:"));
    assert!(stdout(&none).contains("16 ok"));
}

#[test]
fn corrupt_cache_entries_are_misses_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("a.stt"), "def id (A : U) (a : A) : A := a;\n").unwrap();
    assert_eq!(code(&stt(p, &["a.stt"])), 0);
    for entry in fs::read_dir(p.join(".stt-cache")).unwrap() {
        fs::write(entry.unwrap().path(), "{ not json").unwrap();
    }
    let o = stt(p, &["a.stt"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert_eq!(cache_counts(&o), (0, 1));
}

#[test]
fn search_path_sources() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::create_dir(p.join("lib")).unwrap();
    fs::create_dir(p.join("other")).unwrap();
    fs::write(p.join("lib/base.stt"), "def id (A : U) (a : A) : A := a;\n").unwrap();
    fs::write(p.join("main.stt"), "import base;\ndef k (A : U) (a : A) : A := id A a;\n").unwrap();
    assert_eq!(code(&stt(p, &["--no-cache", "main.stt"])), 2);
    assert_eq!(code(&stt(p, &["--no-cache", "--path", "lib", "main.stt"])), 0);
    let via_env = Command::new(env!("CARGO_BIN_EXE_stt"))
        .args(["--no-cache", "main.stt"])
        .current_dir(p)
        .env("STT_PATH", p.join("lib"))
        .output()
        .unwrap();
    assert_eq!(code(&via_env), 0, "{}", stderr(&via_env));
    fs::write(p.join("other/base.stt"), "def id2 : U1 := U;\n").unwrap();
    let ambiguous = stt(p, &["--no-cache", "--path", "lib", "--path", "other", "main.stt"]);
    assert_eq!(code(&ambiguous), 2);
}

#[test]
fn trace_lists_queries_and_bypasses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("a.stt"),
        "def c (A : U) (a : A) (f : ⟨Π (t : I) → A | t ≡ 0 ↦ a⟩) : f 0 =_{A} a := refl;\n",
    )
    .unwrap();
    assert_eq!(code(&stt(p, &["a.stt"])), 0);
    let o = stt(p, &["--trace-tope", "a.stt"]);
    assert!(stderr(&o).contains("-- trace a"));
    assert!(stderr(&o).contains("ENTAILS"), "{}", stderr(&o));
}
