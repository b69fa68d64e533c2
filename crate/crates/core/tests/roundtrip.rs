mod common;

use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stt_core::surface::parser::{parse_expr, parse_source};
use stt_core::surface::print::{print_expr, print_module};
use stt_core::surface::{alpha_eq, module_alpha_eq};

#[test]
fn corpus_files_round_trip() {
    for path in common::corpus_files() {
        let src = fs::read_to_string(&path).unwrap();
        let (m, errs) = parse_source(&path, &src);
        assert!(errs.is_empty(), "{}: {errs:?}", path.display());
        let printed = print_module(&m);
        let (again, errs) = parse_source(&path, &printed);
        assert!(errs.is_empty(), "{}: reparse failed: {errs:?}\n{printed}", path.display());
        assert!(module_alpha_eq(&m, &again), "{}", path.display());
        assert_eq!(print_module(&again), printed, "{}: printing is not idempotent", path.display());
    }
}

#[test]
fn random_trees_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5717);
    for i in 0..10_000 {
        let e = common::random_expr(&mut rng, 5);
        let printed = print_expr(&e);
        let (again, _) = parse_expr(&printed).unwrap_or_else(|d| panic!("tree {i}: `{printed}` does not parse: {d:?}"));
        assert!(alpha_eq(&e, &again), "tree {i}: `{printed}` reparses differently as `{}`", print_expr(&again));
    }
}
