mod common;

use std::collections::BTreeSet;
use std::fs;
use std::time::{Duration, Instant};

use stt_core::corpus::{corpus_manifest, parse_header, required_exports, verify_corpus, Tier, MANIFEST_MODULE};
use stt_core::surface::ast::DeclKind;
use stt_core::surface::parser::parse_source;
use stt_core::tope::DEFAULT_CAPACITY;

fn read_unit(name: &str) -> String {
    fs::read_to_string(common::corpus_dir().join(format!("{name}.stt"))).unwrap()
}

#[test]
fn full_corpus_checks_quickly() {
    let units = corpus_manifest();
    assert!(units.len() >= 13);
    let start = Instant::now();
    let report = verify_corpus(&units, &common::corpus_dir(), DEFAULT_CAPACITY).unwrap();
    let elapsed = start.elapsed();
    assert!(report.ok(), "{:#?}", report.diagnostics);
    assert!(report.stats.declarations_checked > 300);
    assert!(elapsed < Duration::from_secs(60), "{elapsed:?}");
}

#[test]
fn manifest_matches_unit_headers_and_imports() {
    for u in corpus_manifest() {
        let name = u.name();
        let src = read_unit(&name);
        let header = parse_header(&src);
        assert!(header.problems.is_empty(), "{name}: {:?}", header.problems);
        assert_eq!(header.unit.as_deref(), Some(name.as_str()));
        assert_eq!(header.tier, Some(u.tier), "{name}");
        assert_eq!(header.anchors.first(), Some(&u.paper_anchor), "{name}");
        let (m, errs) = parse_source(&u.file, &src);
        assert!(errs.is_empty());
        let imports: Vec<String> = m.imports.iter().map(|i| i.name.clone()).collect();
        assert_eq!(imports, u.depends_on, "{name}");
    }
}

#[test]
fn anchors_resolve_to_known_labels() {
    let labels: BTreeSet<String> = fs::read_to_string(common::corpus_dir().join("anchors.txt"))
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    let mut used = 0;
    for path in common::corpus_files() {
        let header = parse_header(&fs::read_to_string(&path).unwrap());
        for a in header.anchors.iter().chain(header.axioms.iter().map(|x| &x.anchor)) {
            assert!(labels.contains(a), "{}: unknown anchor {a}", path.display());
            used += 1;
        }
    }
    assert!(used > 60);
}

#[test]
fn units_export_their_required_identifiers() {
    for u in corpus_manifest() {
        let name = u.name();
        let (m, _) = parse_source(&u.file, &read_unit(&name));
        let declared: BTreeSet<&str> = m.declarations.iter().map(|d| d.name.as_str()).collect();
        for r in required_exports(&name) {
            assert!(declared.contains(r), "{name} does not declare {r}");
        }
    }
}

#[test]
fn axiom_manifest_is_exactly_the_allowed_postulates() {
    let src = read_unit(MANIFEST_MODULE);
    let header = parse_header(&src);
    let names: BTreeSet<&str> = header.axioms.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, BTreeSet::from(["relfunext", "walking_biinv", "walking_biinv_ump"]));
    assert_eq!(header.tier, None);
}

#[test]
fn postulates_live_only_in_the_manifest_and_the_p_unit() {
    let mut seen = BTreeSet::new();
    for path in common::corpus_files() {
        let src = fs::read_to_string(&path).unwrap();
        let (m, _) = parse_source(&path, &src);
        let tier = parse_header(&src).tier;
        for d in m.declarations.iter().filter(|d| d.kind == DeclKind::Postulate) {
            assert!(
                m.name == MANIFEST_MODULE || tier == Some(Tier::P),
                "{}: postulate {} in a {tier:?} unit",
                m.name,
                d.name
            );
            seen.insert(d.name.clone());
        }
    }
    let expected: BTreeSet<String> = ["relfunext", "walking_biinv", "walking_biinv_ump"].map(str::to_owned).into();
    assert_eq!(seen, expected);
    let p_units: Vec<String> = corpus_manifest().into_iter().filter(|u| u.tier == Tier::P).map(|u| u.name()).collect();
    assert_eq!(p_units, ["walking_biinv"]);
}

#[test]
fn all_imports_every_unit() {
    let (m, _) = parse_source(std::path::Path::new("all.stt"), &read_unit("all"));
    let imports: BTreeSet<String> = m.imports.iter().map(|i| i.name.clone()).collect();
    for u in corpus_manifest() {
        assert!(imports.contains(&u.name()), "all.stt misses {}", u.name());
    }
    assert!(imports.contains(MANIFEST_MODULE));
}

#[test]
fn promotions_name_existing_declarations() {
    let text = fs::read_to_string(common::corpus_dir().join("PROMOTIONS.md")).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| Unit"))
        .map(|l| l.split('|').map(str::trim).filter(|c| !c.is_empty()).collect())
        .collect();
    assert!(!rows.is_empty());
    for row in rows {
        let unit = row[0];
        let decl = row[1].trim_matches('`');
        let (m, _) = parse_source(std::path::Path::new(unit), &read_unit(unit));
        let d = m.declarations.iter().find(|d| d.name == decl).unwrap_or_else(|| panic!("{unit}.{decl}"));
        assert!(d.body.is_some(), "{unit}.{decl} has no proof");
    }
}
