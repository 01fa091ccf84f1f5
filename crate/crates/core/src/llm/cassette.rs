use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::session::Message;
use super::LlmError;
use crate::model::hex;

pub const CASSETTE_FILE: &str = "cassette.json";
const CASSETTE_VERSION: u32 = 1;

#[derive(Serialize)]
struct FingerprintInput<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
}

/// SHA-256 of the canonical JSON request body. Headers and credentials are
/// not part of it.
pub fn request_fingerprint(model: &str, messages: &[Message], temperature: f64) -> String {
    let body = serde_json::to_vec(&FingerprintInput {
        model,
        messages,
        temperature,
    })
    .expect("request serializes");
    hex(&Sha256::digest(&body))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub reply: String,
    pub model: String,
    /// Unix seconds.
    pub recorded_at: u64,
    /// Start of the last user message, for humans reading the file.
    pub request_summary: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct CassetteFile {
    version: u32,
    entries: BTreeMap<String, CassetteEntry>,
}

/// Recorded replies keyed by request fingerprint. Reads are shared, writes exclusive.
#[derive(Debug)]
pub struct Cassette {
    path: PathBuf,
    data: RwLock<CassetteFile>,
}

impl Cassette {
    /// Open `<dir>/cassette.json`; a missing file is an empty cassette.
    pub fn open(dir: &Path) -> Result<Self, LlmError> {
        let path = dir.join(CASSETTE_FILE);
        let data = match std::fs::read_to_string(&path) {
            Ok(text) => {
                let f: CassetteFile =
                    serde_json::from_str(&text).map_err(|e| LlmError::Cassette(format!("{}: {e}", path.display())))?;
                if f.version != CASSETTE_VERSION {
                    return Err(LlmError::Cassette(format!("unsupported cassette version {}", f.version)));
                }
                f
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => CassetteFile {
                version: CASSETTE_VERSION,
                entries: BTreeMap::new(),
            },
            Err(e) => return Err(LlmError::Cassette(format!("{}: {e}", path.display()))),
        };
        Ok(Self {
            path,
            data: RwLock::new(data),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, fingerprint: &str) -> Option<CassetteEntry> {
        self.data.read().unwrap().entries.get(fingerprint).cloned()
    }

    pub fn len(&self) -> usize {
        self.data.read().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fingerprints(&self) -> Vec<String> {
        self.data.read().unwrap().entries.keys().cloned().collect()
    }

    /// Insert or replace an entry and rewrite the file.
    pub fn insert(&self, fingerprint: &str, entry: CassetteEntry) -> Result<(), LlmError> {
        let mut data = self.data.write().unwrap();
        data.entries.insert(fingerprint.to_string(), entry);
        let text = serde_json::to_string_pretty(&*data).expect("cassette serializes");
        crate::store::write_atomic(&self.path, format!("{text}\n").as_bytes())
            .map_err(|e| LlmError::Cassette(format!("{}: {e}", self.path.display())))
    }
}
