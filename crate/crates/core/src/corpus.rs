//! The shipped corpus: unit headers, the fixed unit manifest, the tier rule
//! and whole-corpus verification.
//!
//! Units carry structured comments at the top of the file:
//!
//! ```text
//! --@unit hom
//! --@tier T1
//! --@anchor sec:expo
//! ```
//!
//! and the axiom manifest `AXIOMS.stt` lists the allowed postulates with
//! `--@axiom <name> <anchor>`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::driver::{self, RunConfig};
use crate::kernel::decl::{CheckReport, CheckStats, CheckedModule, Status};

/// Name of the module holding the axiom manifest.
pub const MANIFEST_MODULE: &str = "AXIOMS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    /// Definitions and fully checked proofs.
    T1,
    /// Statements elaborated as well-formed types, without proofs.
    T2,
    /// Postulates from the axiom manifest.
    P,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::T1 => "T1",
            Tier::T2 => "T2",
            Tier::P => "P",
        })
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Tier, String> {
        match s {
            "T1" => Ok(Tier::T1),
            "T2" => Ok(Tier::T2),
            "P" => Ok(Tier::P),
            _ => Err(format!("unknown tier `{s}`; expected T1, T2 or P")),
        }
    }
}

/// An allowed postulate in the axiom manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub name: String,
    pub anchor: String,
}

/// Structured comments of one source file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnitHeader {
    pub unit: Option<String>,
    pub tier: Option<Tier>,
    /// Span of the `--@tier` line.
    pub tier_span: Span,
    pub anchors: Vec<String>,
    pub axioms: Vec<AxiomEntry>,
    /// Malformed structured comments.
    pub problems: Vec<Diagnostic>,
}

/// Read the `--@key value` comments of a source file.
pub fn parse_header(source: &str) -> UnitHeader {
    let mut h = UnitHeader::default();
    let mut offset = 0;
    for line in source.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let text = line.trim_end();
        let Some(rest) = text.strip_prefix("--@") else {
            continue;
        };
        let span = Span::new(start, start + text.len());
        let mut words = rest.split_whitespace();
        let key = words.next().unwrap_or("");
        let args: Vec<&str> = words.collect();
        let bad = |msg: String| Diagnostic::error(Code::Tier, span, msg);
        match (key, args.as_slice()) {
            ("unit", [name]) => h.unit = Some((*name).to_owned()),
            ("tier", [tier]) => match tier.parse() {
                Ok(t) => {
                    h.tier = Some(t);
                    h.tier_span = span;
                }
                Err(e) => h.problems.push(bad(e)),
            },
            ("anchor", [label]) => h.anchors.push((*label).to_owned()),
            ("axiom", [name, anchor]) => h.axioms.push(AxiomEntry {
                name: (*name).to_owned(),
                anchor: (*anchor).to_owned(),
            }),
            ("unit" | "tier" | "anchor" | "axiom", _) => {
                h.problems.push(bad(format!("malformed `--@{key}` comment")))
            }
            _ => {}
        }
    }
    h
}

/// Diagnostics for a module that breaks the tier rule: a T1 unit may only
/// depend on postulates named in the axiom manifest.
pub fn tier_diagnostics(
    header: &UnitHeader,
    checked: &CheckedModule,
    allowed: &BTreeSet<String>,
    decl_span: impl Fn(&str) -> Option<Span>,
) -> Vec<Diagnostic> {
    if header.tier != Some(Tier::T1) {
        return Vec::new();
    }
    checked
        .axioms
        .iter()
        .filter(|a| !allowed.contains(*a))
        .map(|a| {
            let own = checked.postulates.contains(a);
            let span = if own { decl_span(a) } else { None };
            let msg = if own {
                format!("T1 unit `{}` declares postulate `{a}`, which is not in the axiom manifest", checked.name)
            } else {
                format!("T1 unit `{}` depends on postulate `{a}`, which is not in the axiom manifest", checked.name)
            };
            Diagnostic::error(Code::Tier, span.unwrap_or(header.tier_span), msg)
        })
        .collect()
}

/// One file of the shipped corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusUnit {
    /// File name relative to the corpus directory.
    pub file: PathBuf,
    pub paper_anchor: String,
    pub tier: Tier,
    pub depends_on: Vec<String>,
}

impl CorpusUnit {
    pub fn name(&self) -> String {
        crate::surface::parser::module_name(&self.file)
    }
}

struct Entry {
    name: &'static str,
    anchor: &'static str,
    tier: Tier,
    imports: &'static [&'static str],
    required: &'static [&'static str],
}

const MANIFEST: &[Entry] = &[
    Entry {
        name: "prelude",
        anchor: "sec:expo",
        tier: Tier::T1,
        imports: &[],
        required: &["isContr", "isProp", "isEquiv", "Equiv", "fib", "transport"],
    },
    Entry {
        name: "shapes",
        anchor: "fig:sample-shapes",
        tier: Tier::T1,
        imports: &[],
        required: &["Δ⁰", "Δ¹", "Δ²", "∂Δ¹", "∂Δ²", "Λ²₁", "span_shape", "cospan_shape"],
    },
    Entry {
        name: "hom",
        anchor: "sec:expo",
        tier: Tier::T1,
        imports: &["shapes"],
        required: &["hom", "dhom", "hom2", "dhom2", "∂₀", "∂₁", "id_arr"],
    },
    Entry {
        name: "ext_laws",
        anchor: "thm:choice",
        tier: Tier::T1,
        imports: &["prelude", "AXIOMS"],
        required: &[],
    },
    Entry {
        name: "segal_rezk",
        anchor: "sec:expo",
        tier: Tier::T1,
        imports: &["prelude", "hom"],
        required: &["isSegal", "segal_comp", "isIso", "iso", "idtoiso", "isRezk", "isDisc"],
    },
    Entry {
        name: "orthogonality",
        anchor: "sec:closure",
        tier: Tier::T2,
        imports: &["prelude", "hom", "segal_rezk", "ext_laws"],
        required: &["leibniz_cotensor", "isOrthMap", "isOrthFam"],
    },
    Entry {
        name: "lari",
        anchor: "ssec:lari-fam",
        tier: Tier::T2,
        imports: &["prelude", "hom", "segal_rezk", "orthogonality"],
        required: &["hasLari", "isLariFam", "adj_equiv"],
    },
    Entry {
        name: "walking_biinv",
        anchor: "sec:isoinner-fams",
        tier: Tier::P,
        imports: &["prelude", "shapes", "hom", "segal_rezk", "AXIOMS"],
        required: &["walking_biinv", "walking_biinv_ump", "biinv_i₀", "biinv_i₁"],
    },
    Entry {
        name: "inner",
        anchor: "sec:isoinner-fams",
        tier: Tier::T1,
        imports: &["prelude", "shapes", "hom", "segal_rezk", "orthogonality", "walking_biinv"],
        required: &["isInnerFam", "isIsoInnerFam", "inner_segal_fibers", "rezk_iff_endpoint_local"],
    },
    Entry {
        name: "mates_appendix",
        anchor: "app:lax-sq",
        tier: Tier::T2,
        imports: &["prelude", "hom", "segal_rezk"],
        required: &["hpaste", "vpaste", "mate", "mates_correspondence", "conjugate_invertible"],
    },
    Entry {
        name: "lari_appendix",
        anchor: "app:sec:adj",
        tier: Tier::T2,
        imports: &["prelude", "hom", "segal_rezk", "orthogonality", "lari", "mates_appendix", "inner"],
        required: &["transpLari", "biDiagLari", "char_lari", "isInitial", "lari_initial", "isFibAdj"],
    },
    Entry {
        name: "cocart",
        anchor: "sec:cocart-fams",
        tier: Tier::T1,
        imports: &[
            "prelude",
            "shapes",
            "hom",
            "segal_rezk",
            "orthogonality",
            "lari",
            "mates_appendix",
            "lari_appendix",
            "inner",
        ],
        required: &[
            "isCocartArr",
            "CocartLift",
            "hasCocartLifts",
            "isCocartFam",
            "isVertArr",
            "isCocartFun",
            "isCocartSect",
            "chevalley_lari",
            "free_cocart_fam",
        ],
    },
    Entry {
        name: "covariant",
        anchor: "sec:cov-fam",
        tier: Tier::T2,
        imports: &[
            "prelude",
            "shapes",
            "hom",
            "segal_rezk",
            "orthogonality",
            "walking_biinv",
            "inner",
            "lari_appendix",
            "cocart",
        ],
        required: &["isCovFam", "cov_is_inner", "cov_iff_disc_fibers", "directed_encode_decode"],
    },
    Entry {
        name: "yoneda",
        anchor: "sec:yoneda",
        tier: Tier::T2,
        imports: &["prelude", "hom", "segal_rezk", "lari", "lari_appendix", "cocart", "covariant"],
        required: &["yon", "dep_yoneda", "yoneda", "dep_yoneda_cov", "yoneda_cov"],
    },
];

/// The fixed list of corpus units, in dependency order.
pub fn corpus_manifest() -> Vec<CorpusUnit> {
    MANIFEST
        .iter()
        .map(|e| CorpusUnit {
            file: PathBuf::from(format!("{}.stt", e.name)),
            paper_anchor: e.anchor.to_owned(),
            tier: e.tier,
            depends_on: e.imports.iter().map(|d| (*d).to_owned()).collect(),
        })
        .collect()
}

/// Names each unit must export: the identifiers its statements are about.
pub fn required_exports(unit: &str) -> &'static [&'static str] {
    MANIFEST.iter().find(|e| e.name == unit).map_or(&[], |e| e.required)
}

/// Check every unit in dependency order, enforcing tier rules, and fold the
/// per-module reports into one. Diagnostic messages are prefixed with the
/// module name.
pub fn verify_corpus(units: &[CorpusUnit], dir: &Path, capacity: usize) -> Result<CheckReport, Vec<Diagnostic>> {
    let mut report = CheckReport {
        module: "corpus".to_owned(),
        status: Status::Ok,
        diagnostics: Vec::new(),
        stats: CheckStats::default(),
    };
    if units.is_empty() {
        return Ok(report);
    }
    let config = RunConfig {
        targets: units.iter().map(|u| dir.join(&u.file)).collect(),
        search_paths: vec![dir.to_owned()],
        capacity,
        no_cache: true,
        ..RunConfig::default()
    };
    let outcome = driver::execute(&config).map_err(|f| f.errors.into_iter().map(|e| e.diagnostic).collect::<Vec<_>>())?;
    for (name, result) in &outcome.results {
        let r = &result.report;
        if !r.ok() {
            report.status = Status::Failed;
        }
        report.stats.declarations_checked += r.stats.declarations_checked;
        report.stats.solver_queries += r.stats.solver_queries;
        report.stats.wall_time += r.stats.wall_time;
        for d in &r.diagnostics {
            let mut d = d.clone();
            d.message = format!("{name}: {}", d.message);
            report.diagnostics.push(d);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_fields_are_read() {
        let h = parse_header("--@unit hom\n--@tier T1\n--@anchor sec:expo\n--@axiom relfunext ax:relfunext\nimport shapes;\n");
        assert_eq!(h.unit.as_deref(), Some("hom"));
        assert_eq!(h.tier, Some(Tier::T1));
        assert_eq!(h.tier_span, Span::new(12, 22));
        assert_eq!(h.anchors, vec!["sec:expo"]);
        assert_eq!(h.axioms[0].name, "relfunext");
        assert!(h.problems.is_empty());
    }

    #[test]
    fn malformed_headers_are_reported() {
        let h = parse_header("--@tier T3\n--@axiom lonely\n-- @tier T1\n");
        assert_eq!(h.tier, None);
        assert_eq!(h.problems.len(), 2);
        assert!(h.problems.iter().all(|d| d.code == Code::Tier));
    }

    #[test]
    fn tier_rule_only_applies_to_t1() {
        let checked = CheckedModule {
            name: "m".into(),
            ok: true,
            postulates: ["stray".to_owned()].into(),
            axioms: ["stray".to_owned(), "relfunext".to_owned()].into(),
            ..CheckedModule::default()
        };
        let allowed: BTreeSet<String> = ["relfunext".to_owned()].into();
        let mut h = UnitHeader {
            tier: Some(Tier::T1),
            ..UnitHeader::default()
        };
        let ds = tier_diagnostics(&h, &checked, &allowed, |_| Some(Span::new(3, 4)));
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].code, Code::Tier);
        assert_eq!(ds[0].primary_span, Span::new(3, 4));
        h.tier = Some(Tier::P);
        assert!(tier_diagnostics(&h, &checked, &allowed, |_| None).is_empty());
    }

    #[test]
    fn manifest_is_topologically_ordered_and_unique() {
        let units = corpus_manifest();
        assert!(units.len() >= 13);
        let mut seen = BTreeSet::new();
        seen.insert(MANIFEST_MODULE.to_owned());
        for u in &units {
            for d in &u.depends_on {
                assert!(seen.contains(d), "{} depends on later unit {d}", u.name());
            }
            assert!(seen.insert(u.name()), "duplicate unit {}", u.name());
        }
        assert_eq!(units.iter().filter(|u| u.tier == Tier::P).count(), 1);
    }

    #[test]
    fn empty_unit_list_is_ok() {
        let r = verify_corpus(&[], Path::new("."), 8).unwrap();
        assert!(r.ok());
        assert_eq!(r.stats.declarations_checked, 0);
    }
}
