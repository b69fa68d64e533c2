//! Import resolution: from target files to an acyclic graph of parsed
//! modules.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::corpus::{parse_header, UnitHeader};
use crate::diagnostic::{Code, Diagnostic, Span};
use crate::surface::ast::SourceModule;
use crate::surface::parser::{module_name, parse_source};

/// A parsed source file and its place in the graph.
#[derive(Debug)]
pub struct ModuleNode {
    pub name: String,
    /// Path as found, for display.
    pub path: PathBuf,
    pub source: Arc<str>,
    pub module: SourceModule,
    /// Lexing and parsing diagnostics.
    pub syntax_errors: Vec<Diagnostic>,
    pub header: UnitHeader,
    /// Imported module names, deduplicated, in source order.
    pub imports: Vec<String>,
}

/// An acyclic import graph keyed by module name.
#[derive(Debug, Default)]
pub struct ModuleGraph {
    pub modules: BTreeMap<String, ModuleNode>,
    /// Module names, imports before importers, ties broken by name.
    pub order: Vec<String>,
}

impl ModuleGraph {
    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// `name` and every module it imports, directly or not.
    pub fn closure(&self, name: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![name.to_owned()];
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                if let Some(node) = self.modules.get(&n) {
                    stack.extend(node.imports.iter().cloned());
                }
            }
        }
        seen
    }

    /// Direct importers of every module.
    pub fn dependents(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = self.modules.keys().map(|k| (k.clone(), Vec::new())).collect();
        for (name, node) in &self.modules {
            for i in &node.imports {
                out.entry(i.clone()).or_default().push(name.clone());
            }
        }
        out
    }
}

/// A resolution error, located in a file when one is known.
#[derive(Debug, Clone)]
pub struct LocatedError {
    pub file: Option<PathBuf>,
    pub source: Option<Arc<str>>,
    pub diagnostic: Diagnostic,
}

impl LocatedError {
    fn bare(message: String) -> LocatedError {
        LocatedError {
            file: None,
            source: None,
            diagnostic: Diagnostic::error(Code::Import, Span::default(), message),
        }
    }

    fn at(node: &ModuleNode, span: Span, message: String) -> LocatedError {
        LocatedError {
            file: Some(node.path.clone()),
            source: Some(node.source.clone()),
            diagnostic: Diagnostic::error(Code::Import, span, message),
        }
    }

    pub fn render(&self) -> String {
        match (&self.file, &self.source) {
            (Some(f), Some(s)) => self.diagnostic.render(&f.display().to_string(), s),
            _ => format!("error[{}]: {}\n", self.diagnostic.code, self.diagnostic.message),
        }
    }
}

fn load(path: &Path) -> Result<ModuleNode, String> {
    let source = std::fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()))?;
    let (module, syntax_errors) = parse_source(path, &source);
    let mut imports = Vec::new();
    for i in &module.imports {
        if !imports.contains(&i.name) {
            imports.push(i.name.clone());
        }
    }
    Ok(ModuleNode {
        name: module_name(path),
        path: path.to_owned(),
        header: parse_header(&source),
        source: source.into(),
        module,
        syntax_errors,
        imports,
    })
}

/// Resolve `targets` and everything they import. The search path is the
/// directories of the targets followed by `search_paths`; every import
/// `name` must match exactly one file `name.stt` on it.
pub fn resolve(targets: &[PathBuf], search_paths: &[PathBuf]) -> Result<ModuleGraph, Vec<LocatedError>> {
    let mut errors = Vec::new();
    let mut dirs: Vec<PathBuf> = Vec::new();
    let mut seen_dirs = BTreeSet::new();
    let mut push_dir = |d: &Path, dirs: &mut Vec<PathBuf>| {
        let d = if d.as_os_str().is_empty() { Path::new(".") } else { d };
        let key = d.canonicalize().unwrap_or_else(|_| d.to_owned());
        if seen_dirs.insert(key) {
            dirs.push(d.to_owned());
        }
    };
    for t in targets {
        if let Some(parent) = t.parent() {
            push_dir(parent, &mut dirs);
        }
    }
    for d in search_paths {
        push_dir(d, &mut dirs);
    }

    let mut graph = ModuleGraph::default();
    // Canonical path of every loaded module, to detect two files with one name.
    let mut canon: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut pending: Vec<String> = Vec::new();

    for t in targets {
        if !t.is_file() {
            errors.push(LocatedError::bare(format!("file `{}` was not found", t.display())));
            continue;
        }
        let c = t.canonicalize().unwrap_or_else(|_| t.clone());
        let name = module_name(t);
        match canon.get(&name) {
            Some(existing) if *existing != c => {
                errors.push(LocatedError::bare(format!(
                    "two targets define module `{name}`: `{}` and `{}`",
                    existing.display(),
                    t.display()
                )));
                continue;
            }
            Some(_) => continue,
            None => {}
        }
        match load(t) {
            Ok(node) => {
                canon.insert(name.clone(), c);
                pending.push(name.clone());
                graph.modules.insert(name, node);
            }
            Err(e) => errors.push(LocatedError::bare(e)),
        }
    }

    while let Some(name) = pending.pop() {
        let imports: Vec<(String, Span)> = graph.modules[&name]
            .module
            .imports
            .iter()
            .map(|i| (i.name.clone(), i.span))
            .collect();
        for (import, span) in imports {
            let candidates: BTreeMap<PathBuf, PathBuf> = dirs
                .iter()
                .map(|d| d.join(format!("{import}.stt")))
                .filter(|p| p.is_file())
                .map(|p| (p.canonicalize().unwrap_or_else(|_| p.clone()), p))
                .collect();
            let node = &graph.modules[&name];
            if candidates.is_empty() {
                errors.push(LocatedError::at(
                    node,
                    span,
                    format!("module `{import}` was not found on the search path"),
                ));
                continue;
            }
            if candidates.len() > 1 {
                let files: Vec<String> = candidates.values().map(|p| format!("`{}`", p.display())).collect();
                errors.push(LocatedError::at(
                    node,
                    span,
                    format!("module `{import}` is ambiguous: {}", files.join(", ")),
                ));
                continue;
            }
            let (c, path) = candidates.into_iter().next().expect("one candidate");
            if let Some(existing) = canon.get(&import) {
                if *existing != c {
                    errors.push(LocatedError::at(
                        node,
                        span,
                        format!(
                            "module `{import}` resolves to `{}` but `{}` is already loaded",
                            path.display(),
                            existing.display()
                        ),
                    ));
                }
                continue;
            }
            match load(&path) {
                Ok(n) => {
                    canon.insert(import.clone(), c);
                    pending.push(import.clone());
                    graph.modules.insert(import, n);
                }
                Err(e) => errors.push(LocatedError::at(node, span, e)),
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    if let Some(cycle) = find_cycle(&graph) {
        let first = &graph.modules[&cycle[0]];
        let span = first
            .module
            .imports
            .iter()
            .find(|i| i.name == cycle[1])
            .map_or_else(Span::default, |i| i.span);
        return Err(vec![LocatedError::at(
            first,
            span,
            format!("import cycle: {}", cycle.join(" → ")),
        )]);
    }
    graph.order = topo_order(&graph);
    Ok(graph)
}

/// A cycle as a closed path of module names, if there is one.
fn find_cycle(graph: &ModuleGraph) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit(
        graph: &ModuleGraph,
        n: &str,
        marks: &mut BTreeMap<String, Mark>,
        stack: &mut Vec<String>,
    ) -> Option<Vec<String>> {
        match marks.get(n) {
            Some(Mark::Done) => return None,
            Some(Mark::Open) => {
                let at = stack.iter().position(|s| s == n).expect("open module is on the stack");
                let mut cycle = stack[at..].to_vec();
                cycle.push(n.to_owned());
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(n.to_owned(), Mark::Open);
        stack.push(n.to_owned());
        for i in &graph.modules[n].imports {
            if let Some(c) = visit(graph, i, marks, stack) {
                return Some(c);
            }
        }
        stack.pop();
        marks.insert(n.to_owned(), Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    for n in graph.modules.keys() {
        if let Some(c) = visit(graph, n, &mut marks, &mut Vec::new()) {
            return Some(c);
        }
    }
    None
}

fn topo_order(graph: &ModuleGraph) -> Vec<String> {
    let mut missing: BTreeMap<&str, usize> = graph
        .modules
        .iter()
        .map(|(n, node)| (n.as_str(), node.imports.len()))
        .collect();
    let dependents = graph.dependents();
    let mut ready: BTreeSet<&str> = missing.iter().filter(|(_, c)| **c == 0).map(|(n, _)| *n).collect();
    let mut order = Vec::new();
    while let Some(n) = ready.pop_first() {
        order.push(n.to_owned());
        for d in &dependents[n] {
            let c = missing.get_mut(d.as_str()).expect("dependent is a module");
            *c -= 1;
            if *c == 0 {
                ready.insert(d);
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(format!("{name}.stt"));
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn single_file_is_a_graph_of_one() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "a", "def x : U1 := U;\n");
        let g = resolve(&[p], &[]).unwrap();
        assert_eq!(g.order, vec!["a"]);
    }

    #[test]
    fn imports_come_first_in_order() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "base", "def x : U1 := U;\n");
        write(d.path(), "mid", "import base;\n");
        let top = write(d.path(), "top", "import mid;\nimport base;\n");
        let g = resolve(&[top], &[]).unwrap();
        assert_eq!(g.order, vec!["base", "mid", "top"]);
        assert_eq!(g.closure("mid").into_iter().collect::<Vec<_>>(), vec!["base", "mid"]);
    }

    #[test]
    fn mutual_imports_are_a_cycle() {
        let d = tempfile::tempdir().unwrap();
        let a = write(d.path(), "a", "import b;\n");
        write(d.path(), "b", "import a;\n");
        let e = resolve(&[a], &[]).unwrap_err();
        assert_eq!(e.len(), 1);
        assert!(e[0].diagnostic.message.contains("import cycle"), "{}", e[0].diagnostic.message);
    }

    #[test]
    fn missing_import_and_missing_target() {
        let d = tempfile::tempdir().unwrap();
        let a = write(d.path(), "a", "import nowhere;\n");
        let e = resolve(&[a], &[]).unwrap_err();
        assert!(e[0].diagnostic.message.contains("`nowhere` was not found"));
        let e = resolve(&[d.path().join("absent.stt")], &[]).unwrap_err();
        assert!(e[0].render().starts_with("error[IMPORT]: file"));
    }

    #[test]
    fn search_path_finds_imports_and_rejects_ambiguity() {
        let d = tempfile::tempdir().unwrap();
        let lib = d.path().join("lib");
        let other = d.path().join("other");
        std::fs::create_dir_all(&lib).unwrap();
        std::fs::create_dir_all(&other).unwrap();
        write(&lib, "dep", "def x : U1 := U;\n");
        let main = write(d.path(), "main", "import dep;\n");
        assert_eq!(resolve(std::slice::from_ref(&main), std::slice::from_ref(&lib)).unwrap().len(), 2);
        write(&other, "dep", "def y : U1 := U;\n");
        let e = resolve(&[main], &[lib, other]).unwrap_err();
        assert!(e[0].diagnostic.message.contains("ambiguous"));
    }
}
