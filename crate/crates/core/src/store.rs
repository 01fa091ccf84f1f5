//! Atomic file writes and the on-disk results store.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Write through a temp file in the same directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub report: String,
}

/// Directory of fingerprint-named reports plus an `index.json` summary.
#[derive(Debug, Clone)]
pub struct ResultsStore {
    root: PathBuf,
}

impl ResultsStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn report_path(&self, fingerprint: &str) -> PathBuf {
        self.root.join(format!("{fingerprint}.json"))
    }

    pub fn config_path(&self, fingerprint: &str) -> PathBuf {
        self.root.join(format!("{fingerprint}.config.toml"))
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    pub fn index(&self) -> std::io::Result<BTreeMap<String, IndexEntry>> {
        match std::fs::read_to_string(self.index_path()) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
            Err(e) => Err(e),
        }
    }

    /// Store a report and its config, then update the index.
    pub fn put(&self, fingerprint: &str, report_json: &str, config_toml: &str, entry: IndexEntry) -> std::io::Result<PathBuf> {
        let path = self.report_path(fingerprint);
        write_atomic(&path, report_json.as_bytes())?;
        write_atomic(&self.config_path(fingerprint), config_toml.as_bytes())?;
        let mut index = self.index()?;
        index.insert(fingerprint.to_string(), entry);
        let text = serde_json::to_string_pretty(&index).expect("index serializes");
        write_atomic(&self.index_path(), text.as_bytes())?;
        Ok(path)
    }

    pub fn get(&self, fingerprint: &str) -> std::io::Result<Option<String>> {
        match std::fs::read_to_string(self.report_path(fingerprint)) {
            Ok(t) => Ok(Some(t)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }
}
