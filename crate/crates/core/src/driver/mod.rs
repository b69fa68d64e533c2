//! Batch driver: resolve imports, check modules on a worker pool, consult
//! the cache, and render reports.

pub mod cache;
pub mod resolve;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use parking_lot::{Condvar, Mutex};
use serde::Serialize;

use crate::corpus::{tier_diagnostics, MANIFEST_MODULE};
use crate::diagnostic::{Code, Diagnostic, Severity};
use crate::kernel::conv::Checker;
use crate::kernel::decl::{check_module, CheckReport, CheckStats, CheckedModule, Status};
use crate::tope::{Memo, Solver, DEFAULT_CAPACITY};

pub use cache::{module_key, Cache, Lookup};
pub use resolve::{resolve, LocatedError, ModuleGraph, ModuleNode};

/// Exit code when every module checks.
pub const EXIT_OK: i32 = 0;
/// Exit code when some module has an error.
pub const EXIT_CHECK: i32 = 1;
/// Exit code for usage, IO and resolution errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub targets: Vec<PathBuf>,
    pub search_paths: Vec<PathBuf>,
    pub json_output: bool,
    pub trace_tope: bool,
    pub jobs: usize,
    pub capacity: usize,
    pub no_cache: bool,
    pub cache_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            targets: Vec::new(),
            search_paths: Vec::new(),
            json_output: false,
            trace_tope: false,
            jobs: 1,
            capacity: DEFAULT_CAPACITY,
            no_cache: false,
            cache_dir: PathBuf::from(".stt-cache"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

#[derive(Debug, Clone)]
pub struct ModuleResult {
    pub report: CheckReport,
    pub cache: CacheStatus,
    /// Solver trace lines, when requested.
    pub trace: Vec<String>,
}

/// Results of a run that got past resolution.
#[derive(Debug)]
pub struct RunOutcome {
    pub graph: ModuleGraph,
    pub results: BTreeMap<String, ModuleResult>,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.results.values().all(|r| r.report.ok())
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            EXIT_OK
        } else {
            EXIT_CHECK
        }
    }

    pub fn hits(&self) -> usize {
        self.results.values().filter(|r| r.cache == CacheStatus::Hit).count()
    }

    pub fn misses(&self) -> usize {
        self.results.values().filter(|r| r.cache == CacheStatus::Miss).count()
    }
}

#[derive(Debug)]
pub struct ResolveFailure {
    pub errors: Vec<LocatedError>,
}

struct Plan {
    keys: BTreeMap<String, String>,
    cached: BTreeMap<String, CheckReport>,
    /// Modules that must be elaborated, either for their own report or for
    /// the exports an importer needs.
    needed: BTreeSet<String>,
    lookups: BTreeMap<String, CacheStatus>,
    warnings: Vec<String>,
}

fn plan(graph: &ModuleGraph, config: &RunConfig, cache: Option<&Cache>) -> Plan {
    let mut p = Plan {
        keys: BTreeMap::new(),
        cached: BTreeMap::new(),
        needed: BTreeSet::new(),
        lookups: BTreeMap::new(),
        warnings: Vec::new(),
    };
    for name in &graph.order {
        let node = &graph.modules[name];
        let imports: BTreeMap<&str, &str> = node
            .imports
            .iter()
            .map(|i| (i.as_str(), p.keys[i].as_str()))
            .collect();
        let key = module_key(&node.source, config.capacity, &imports);
        let status = match cache {
            None => CacheStatus::Disabled,
            Some(c) => match c.lookup(&key, name) {
                Lookup::Hit(r) => {
                    p.cached.insert(name.clone(), r);
                    CacheStatus::Hit
                }
                Lookup::Miss => CacheStatus::Miss,
                Lookup::Corrupt(why) => {
                    p.warnings.push(format!("ignoring corrupt cache entry for module `{name}`: {why}"));
                    CacheStatus::Miss
                }
            },
        };
        p.lookups.insert(name.clone(), status);
        p.keys.insert(name.clone(), key);
    }
    for name in graph.order.iter().rev() {
        if !p.cached.contains_key(name) {
            p.needed.insert(name.clone());
        }
        if p.needed.contains(name) {
            for i in &graph.modules[name].imports {
                p.needed.insert(i.clone());
            }
        }
    }
    p
}

/// Check one module given its checked imports.
fn check_node(
    graph: &ModuleGraph,
    node: &ModuleNode,
    done: &BTreeMap<String, Arc<CheckedModule>>,
    checker: &Checker,
) -> (CheckReport, CheckedModule) {
    if !node.syntax_errors.is_empty() {
        let report = CheckReport {
            module: node.name.clone(),
            status: Status::Failed,
            diagnostics: node.syntax_errors.clone(),
            stats: CheckStats::default(),
        };
        let checked = CheckedModule {
            name: node.name.clone(),
            ok: false,
            ..CheckedModule::default()
        };
        return (report, checked);
    }
    let env = |n: &str| done.get(n).cloned();
    let (mut report, mut checked) = check_module(&node.module, &env, checker);

    let mut extra = node.header.problems.clone();
    let closure = graph.closure(&node.name);
    let allowed: BTreeSet<String> = if closure.contains(MANIFEST_MODULE) {
        graph.modules[MANIFEST_MODULE]
            .header
            .axioms
            .iter()
            .map(|a| a.name.clone())
            .collect()
    } else {
        BTreeSet::new()
    };
    extra.extend(tier_diagnostics(&node.header, &checked, &allowed, |n| {
        node.module
            .declarations
            .iter()
            .find(|d| d.name == n)
            .map(|d| d.name_span)
    }));
    if extra.iter().any(Diagnostic::is_error) {
        report.status = Status::Failed;
        checked.ok = false;
    }
    report.diagnostics.extend(extra);
    (report, checked)
}

struct Shared {
    ready: BTreeSet<String>,
    waiting: BTreeMap<String, usize>,
    done: BTreeMap<String, Arc<CheckedModule>>,
    results: BTreeMap<String, (CheckReport, Vec<String>)>,
    remaining: usize,
}

/// Resolve and check, without printing.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, ResolveFailure> {
    if config.targets.is_empty() {
        return Err(ResolveFailure {
            errors: vec![LocatedError {
                file: None,
                source: None,
                diagnostic: Diagnostic::error(Code::Import, Default::default(), "no input files"),
            }],
        });
    }
    let graph = resolve(&config.targets, &config.search_paths).map_err(|errors| ResolveFailure { errors })?;
    let cache = (!config.no_cache).then(|| Cache::new(config.cache_dir.clone()));
    // Tracing replays nothing: every module is elaborated afresh.
    let lookup_cache = if config.trace_tope { None } else { cache.as_ref() };
    let mut p = plan(&graph, config, lookup_cache);
    if config.trace_tope && cache.is_some() {
        for s in p.lookups.values_mut() {
            *s = CacheStatus::Miss;
        }
    }

    let dependents = graph.dependents();
    let needed: Vec<&String> = graph.order.iter().filter(|n| p.needed.contains(*n)).collect();
    let waiting: BTreeMap<String, usize> = needed
        .iter()
        .map(|n| ((*n).clone(), graph.modules[*n].imports.len()))
        .collect();
    let shared = Mutex::new(Shared {
        ready: waiting.iter().filter(|(_, c)| **c == 0).map(|(n, _)| n.clone()).collect(),
        waiting,
        done: BTreeMap::new(),
        results: BTreeMap::new(),
        remaining: needed.len(),
    });
    let wake = Condvar::new();
    let memo = Arc::new(Memo::new());
    let jobs = config.jobs.max(1).min(needed.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| {
                let mut solver = Solver::with_memo(config.capacity, memo.clone());
                if config.trace_tope {
                    solver = solver.with_trace();
                }
                let checker = Checker::new(solver);
                loop {
                    let (name, done) = {
                        let mut s = shared.lock();
                        loop {
                            if s.remaining == 0 {
                                return;
                            }
                            if let Some(n) = s.ready.pop_first() {
                                break (n, s.done.clone());
                            }
                            wake.wait(&mut s);
                        }
                    };
                    let node = &graph.modules[&name];
                    let start = Instant::now();
                    let (mut report, checked) = check_node(&graph, node, &done, &checker);
                    report.stats.wall_time = start.elapsed();
                    let trace = checker.solver.take_trace();
                    let mut s = shared.lock();
                    s.done.insert(name.clone(), Arc::new(checked));
                    s.results.insert(name.clone(), (report, trace));
                    s.remaining -= 1;
                    for d in &dependents[&name] {
                        if let Some(c) = s.waiting.get_mut(d) {
                            *c -= 1;
                            if *c == 0 {
                                s.ready.insert(d.clone());
                            }
                        }
                    }
                    wake.notify_all();
                }
            });
        }
    });

    let fresh = shared.into_inner().results;
    let mut results = BTreeMap::new();
    let mut warnings = std::mem::take(&mut p.warnings);
    for name in graph.modules.keys() {
        let status = p.lookups[name];
        let (report, trace) = match p.cached.remove(name) {
            Some(r) => (r, Vec::new()),
            None => {
                let (r, t) = fresh[name].clone();
                if let Some(c) = &cache {
                    if let Err(e) = c.store(&p.keys[name], &r) {
                        warnings.push(format!("cannot write cache entry for module `{name}`: {e}"));
                    }
                }
                (r, t)
            }
        };
        results.insert(name.clone(), ModuleResult {
            report,
            cache: status,
            trace,
        });
    }
    Ok(RunOutcome {
        graph,
        results,
        warnings,
    })
}

#[derive(Serialize)]
struct JsonSpan<'a> {
    file: &'a str,
    start: usize,
    end: usize,
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    code: Code,
    severity: Severity,
    message: &'a str,
    span: JsonSpan<'a>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    module: &'a str,
    status: Status,
    diagnostics: Vec<JsonDiagnostic<'a>>,
    stats: &'a CheckStats,
}

/// One line of JSON for a module.
pub fn json_line(report: &CheckReport, file: &str) -> String {
    let j = JsonReport {
        module: &report.module,
        status: report.status,
        diagnostics: report
            .diagnostics
            .iter()
            .map(|d| JsonDiagnostic {
                code: d.code,
                severity: d.severity,
                message: &d.message,
                span: JsonSpan {
                    file,
                    start: d.primary_span.start,
                    end: d.primary_span.end,
                },
            })
            .collect(),
        stats: &report.stats,
    };
    serde_json::to_string(&j).expect("reports serialize")
}

/// Write the reports of a run to `out` and its warnings and traces to `err`.
pub fn render(config: &RunConfig, outcome: &RunOutcome, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<()> {
    for w in &outcome.warnings {
        writeln!(err, "warning: {w}")?;
    }
    for (name, r) in &outcome.results {
        let node = &outcome.graph.modules[name];
        let file = node.path.display().to_string();
        if config.trace_tope {
            writeln!(err, "-- trace {name}")?;
            for line in &r.trace {
                writeln!(err, "{line}")?;
            }
        }
        if config.json_output {
            writeln!(out, "{}", json_line(&r.report, &file))?;
            continue;
        }
        for d in &r.report.diagnostics {
            write!(out, "{}", d.render(&file, &node.source))?;
        }
        let errors = r.report.errors().count();
        match r.report.status {
            Status::Ok => writeln!(out, "ok      {name} ({} declarations)", r.report.stats.declarations_checked)?,
            Status::Failed => writeln!(
                out,
                "FAILED  {name} ({errors} error{})",
                if errors == 1 { "" } else { "s" }
            )?,
        }
    }
    if !config.json_output {
        let failed = outcome.results.values().filter(|r| !r.report.ok()).count();
        writeln!(
            out,
            "checked {} modules: {} ok, {failed} failed",
            outcome.results.len(),
            outcome.results.len() - failed
        )?;
    }
    if !config.no_cache {
        writeln!(err, "cache: {} hits, {} misses", outcome.hits(), outcome.misses())?;
    }
    Ok(())
}

/// Run the driver, printing to `out` and `err`; returns the exit code.
pub fn run_with(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config) {
        Err(f) => {
            for e in &f.errors {
                let _ = write!(err, "{}", e.render());
            }
            EXIT_USAGE
        }
        Ok(outcome) => match render(config, &outcome, out, err) {
            Ok(()) => outcome.exit_code(),
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                EXIT_USAGE
            }
        },
    }
}

/// Run the driver on the process's standard streams.
pub fn run(config: &RunConfig) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(config, &mut stdout.lock(), &mut stderr.lock())
}
