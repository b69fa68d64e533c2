//! Python bindings for the stt checker.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use stt_core::diagnostic::{line_col, Severity};
use stt_core::driver::{self, CacheStatus, RunConfig};
use stt_core::kernel::decl::CheckReport;
use stt_core::surface::{parse_source, print_module};
use stt_core::tope::{self, read_tope, CubeCtx, Shape, Solver, TopeError, DEFAULT_CAPACITY};

fn tope_err(e: TopeError) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code()))
}

/// One diagnostic attached to a module.
#[pyclass(frozen, get_all, skip_from_py_object, module = "stt")]
#[derive(Clone)]
pub struct Diagnostic {
    code: String,
    severity: String,
    message: String,
    start: usize,
    end: usize,
}

#[pymethods]
impl Diagnostic {
    fn __repr__(&self) -> String {
        format!("Diagnostic({} {}: {})", self.severity, self.code, self.message)
    }
}

/// The check result for one module.
#[pyclass(frozen, get_all, skip_from_py_object, module = "stt")]
#[derive(Clone)]
pub struct Report {
    module: String,
    path: String,
    ok: bool,
    cached: bool,
    declarations: usize,
    solver_queries: u64,
    diagnostics: Vec<Diagnostic>,
    json: String,
}

impl Report {
    fn new(report: &CheckReport, path: String, cached: bool) -> Report {
        Report {
            module: report.module.clone(),
            ok: report.ok(),
            cached,
            declarations: report.stats.declarations_checked,
            solver_queries: report.stats.solver_queries,
            diagnostics: report
                .diagnostics
                .iter()
                .map(|d| Diagnostic {
                    code: d.code.as_str().to_owned(),
                    severity: match d.severity {
                        Severity::Error => "error",
                        Severity::Warning => "warning",
                    }
                    .to_owned(),
                    message: d.message.clone(),
                    start: d.primary_span.start,
                    end: d.primary_span.end,
                })
                .collect(),
            json: driver::json_line(report, &path),
            path,
        }
    }
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        let status = if self.ok { "ok" } else { "failed" };
        format!("Report({} {status}, {} declarations)", self.module, self.declarations)
    }
}

/// The outcome of checking a set of targets.
#[pyclass(frozen, get_all, module = "stt")]
pub struct Run {
    exit_code: i32,
    reports: Vec<Report>,
    warnings: Vec<String>,
    hits: usize,
    misses: usize,
}

#[pymethods]
impl Run {
    #[getter]
    fn ok(&self) -> bool {
        self.exit_code == driver::EXIT_OK
    }

    fn __repr__(&self) -> String {
        let failed = self.reports.iter().filter(|r| !r.ok).count();
        format!("Run(exit_code={}, {} modules, {failed} failed)", self.exit_code, self.reports.len())
    }
}

/// Check `targets` and everything they import.
///
/// Resolution failures (missing or ambiguous imports) raise `OSError`.
#[pyfunction]
#[pyo3(signature = (targets, search_paths = Vec::new(), jobs = 1, capacity = DEFAULT_CAPACITY, use_cache = false, cache_dir = PathBuf::from(".stt-cache")))]
fn check(
    py: Python<'_>,
    targets: Vec<PathBuf>,
    search_paths: Vec<PathBuf>,
    jobs: usize,
    capacity: usize,
    use_cache: bool,
    cache_dir: PathBuf,
) -> PyResult<Run> {
    let config = RunConfig {
        targets,
        search_paths,
        jobs: jobs.max(1),
        capacity,
        no_cache: !use_cache,
        cache_dir,
        ..RunConfig::default()
    };
    let outcome = py.detach(|| driver::execute(&config)).map_err(|f| {
        let rendered: Vec<String> = f.errors.iter().map(|e| e.render()).collect();
        PyOSError::new_err(rendered.concat())
    })?;
    let reports = outcome
        .results
        .iter()
        .map(|(name, r)| {
            let path = outcome.graph.modules[name].path.display().to_string();
            Report::new(&r.report, path, r.cache == CacheStatus::Hit)
        })
        .collect();
    Ok(Run {
        exit_code: outcome.exit_code(),
        reports,
        warnings: outcome.warnings.clone(),
        hits: outcome.hits(),
        misses: outcome.misses(),
    })
}

/// Parse `source` and print it back in canonical layout.
///
/// Raises `ValueError` with the first diagnostic if the source does not parse.
#[pyfunction]
#[pyo3(signature = (source, name = "<input>"))]
fn format_source(source: &str, name: &str) -> PyResult<String> {
    let (module, errors) = parse_source(&PathBuf::from(name), source);
    match errors.first() {
        None => Ok(print_module(&module)),
        Some(d) => {
            let (line, col) = line_col(source, d.primary_span.start);
            Err(PyValueError::new_err(format!("{name}:{line}:{col}: {}: {}", d.code, d.message)))
        }
    }
}

/// Decide `hyps ⊢ goal` over interval variables `vars`.
#[pyfunction]
#[pyo3(signature = (vars, hyps, goal, capacity = DEFAULT_CAPACITY))]
fn entails(vars: Vec<String>, hyps: &str, goal: &str, capacity: usize) -> PyResult<bool> {
    let ctx = CubeCtx::intervals(&vars);
    let h = read_tope(&ctx, hyps).map_err(tope_err)?;
    let g = read_tope(&ctx, goal).map_err(tope_err)?;
    Solver::new(capacity).entails(&ctx, &h, &g).map_err(tope_err)
}

/// Decide `hyps ⊢ goal` by brute-force enumeration of orderings.
#[pyfunction]
fn oracle_entails(vars: Vec<String>, hyps: &str, goal: &str) -> PyResult<bool> {
    let ctx = CubeCtx::intervals(&vars);
    let h = read_tope(&ctx, hyps).map_err(tope_err)?;
    let g = read_tope(&ctx, goal).map_err(tope_err)?;
    tope::oracle_entails(&ctx, &h, &g).map_err(tope_err)
}

/// Whether the shape `{vars | sub}` is contained in `{vars | sup}`.
#[pyfunction]
fn shape_included(vars: Vec<String>, sub: &str, sup: &str) -> PyResult<bool> {
    let ctx = CubeCtx::intervals(&vars);
    let shape = |src: &str| -> PyResult<Shape> {
        Ok(Shape {
            vars: ctx.vars.clone(),
            tope: read_tope(&ctx, src).map_err(tope_err)?,
        })
    };
    tope::shape_included(&shape(sub)?, &shape(sup)?).map_err(tope_err)
}

#[pymodule]
fn stt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EXIT_OK", driver::EXIT_OK)?;
    m.add("EXIT_CHECK", driver::EXIT_CHECK)?;
    m.add("EXIT_USAGE", driver::EXIT_USAGE)?;
    m.add("DEFAULT_CAPACITY", DEFAULT_CAPACITY)?;
    m.add_class::<Diagnostic>()?;
    m.add_class::<Report>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(format_source, m)?)?;
    m.add_function(wrap_pyfunction!(entails, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_entails, m)?)?;
    m.add_function(wrap_pyfunction!(shape_included, m)?)?;
    Ok(())
}
