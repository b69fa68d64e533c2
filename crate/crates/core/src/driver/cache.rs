//! On-disk cache of check reports keyed by content hashes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::kernel::decl::CheckReport;

const FORMAT: &str = "stt-cache-v1";

/// The key of a module: its source bytes, the capacity it is checked at and
/// the keys of its imports.
pub fn module_key(source: &str, capacity: usize, imports: &BTreeMap<&str, &str>) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT.as_bytes());
    h.update((capacity as u64).to_le_bytes());
    h.update((source.len() as u64).to_le_bytes());
    h.update(source.as_bytes());
    for (name, key) in imports {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update(key.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
struct Entry {
    format: String,
    key: String,
    report: CheckReport,
}

#[derive(Debug)]
pub enum Lookup {
    Hit(CheckReport),
    Miss,
    /// An unreadable or inconsistent entry; read as a miss.
    Corrupt(String),
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn lookup(&self, key: &str, module: &str) -> Lookup {
        let path = self.file(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("cannot read `{}`: {e}", path.display())),
        };
        match serde_json::from_slice::<Entry>(&bytes) {
            Ok(e) if e.format == FORMAT && e.key == key && e.report.module == module => Lookup::Hit(e.report),
            Ok(_) => Lookup::Corrupt(format!("`{}` does not match its key", path.display())),
            Err(e) => Lookup::Corrupt(format!("`{}` is not a valid entry: {e}", path.display())),
        }
    }

    /// Store a report, replacing any previous entry atomically.
    pub fn store(&self, key: &str, report: &CheckReport) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            format: FORMAT.to_owned(),
            key: key.to_owned(),
            report: report.clone(),
        };
        let mut tmp = tempfile_in(&self.dir, key)?;
        serde_json::to_writer(&mut tmp.1, &entry)?;
        tmp.1.flush()?;
        drop(tmp.1);
        std::fs::rename(&tmp.0, self.file(key))
    }
}

fn tempfile_in(dir: &Path, key: &str) -> std::io::Result<(PathBuf, std::fs::File)> {
    let path = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    let file = std::fs::File::create(&path)?;
    Ok((path, file))
}
