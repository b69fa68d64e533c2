mod common;

use std::fs;

use common::{crate_dir, run_golden, GOLDEN_TRACE};

#[test]
fn golden_cases_have_expected_verdicts() {
    let run = run_golden();
    assert!(run.verdicts.len() >= 30);
    let wrong: Vec<String> = run
        .verdicts
        .iter()
        .filter(|(_, e, a)| e != a)
        .map(|(n, e, a)| format!("{n}: expected {e}, got {a}"))
        .collect();
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}

/// Set `STT_BLESS=1` to rewrite the expected trace.
#[test]
fn golden_trace_is_byte_stable() {
    let first = run_golden().output;
    let second = run_golden().output;
    assert_eq!(first, second);
    let path = crate_dir().join(GOLDEN_TRACE);
    if std::env::var_os("STT_BLESS").is_some() {
        fs::write(&path, &first).unwrap();
    }
    let expected = fs::read_to_string(&path).expect("golden trace; run with STT_BLESS=1 to create it");
    assert_eq!(first, expected);
}
