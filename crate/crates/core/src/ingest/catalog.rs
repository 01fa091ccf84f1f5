//! Sensor location catalog.
//!
//! The catalog maps body-location ids to dataset columns, carries the
//! natural-language aliases used to resolve LLM suggestions, and holds the
//! Locomotion code table. It is a data file, never logic.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::label::{ActivityLabel, LabelTable};
use super::IngestError;

const DEFAULT_CATALOG: &str = include_str!("../../data/opportunity_catalog.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Acc,
    Gyro,
    Mag,
}

/// Three dataset columns forming one x/y/z sensor triad.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triad {
    pub name: String,
    pub modality: Modality,
    pub columns: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorLocation {
    pub id: String,
    /// Human-readable body position, used in prompts.
    pub name: String,
    pub aliases: Vec<String>,
    pub triads: Vec<Triad>,
}

impl SensorLocation {
    pub fn channel_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.triads.iter().flat_map(|t| t.columns.iter().copied())
    }
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    version: u32,
    #[serde(default)]
    dataset: String,
    time_column: usize,
    label_column: usize,
    n_columns: usize,
    sample_rate_hz: f64,
    labels: Vec<LabelEntry>,
    locations: Vec<SensorLocation>,
}

#[derive(Debug, Deserialize)]
struct LabelEntry {
    code: i64,
    label: ActivityLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub version: u32,
    pub dataset: String,
    pub time_column: usize,
    pub label_column: usize,
    pub n_columns: usize,
    pub sample_rate_hz: f64,
    labels: LabelTable,
    locations: Vec<SensorLocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("no sensor location matches `{0}`")]
    Unresolved(String),
    #[error("`{input}` is ambiguous between {}", candidates.join(", "))]
    Ambiguous {
        input: String,
        candidates: Vec<String>,
    },
}

impl Catalog {
    /// The shipped OPPORTUNITY catalog.
    pub fn opportunity() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG).expect("shipped catalog is valid")
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| IngestError::Catalog(e.to_string()))?;
        let catalog = Catalog {
            version: file.version,
            dataset: file.dataset,
            time_column: file.time_column,
            label_column: file.label_column,
            n_columns: file.n_columns,
            sample_rate_hz: file.sample_rate_hz,
            labels: LabelTable::new(file.labels.into_iter().map(|e| (e.code, e.label)).collect()),
            locations: file.locations,
        };
        catalog.validate()?;
        Ok(catalog)
    }

    /// Build a catalog in code; used by tests and bindings.
    pub fn from_parts(
        locations: Vec<SensorLocation>,
        labels: LabelTable,
        time_column: usize,
        label_column: usize,
        n_columns: usize,
        sample_rate_hz: f64,
    ) -> Result<Self, IngestError> {
        let catalog = Catalog {
            version: 1,
            dataset: String::new(),
            time_column,
            label_column,
            n_columns,
            sample_rate_hz,
            labels,
            locations,
        };
        catalog.validate()?;
        Ok(catalog)
    }

    fn validate(&self) -> Result<(), IngestError> {
        let err = |m: String| Err(IngestError::Catalog(m));
        if self.locations.is_empty() {
            return err("catalog has no locations".into());
        }
        if self.sample_rate_hz.is_nan() || self.sample_rate_hz <= 0.0 {
            return err(format!("sample_rate_hz must be positive, got {}", self.sample_rate_hz));
        }
        let in_range = |c: usize| c >= 1 && c <= self.n_columns;
        if !in_range(self.time_column) || !in_range(self.label_column) {
            return err("time/label column outside 1..=n_columns".into());
        }
        let mut ids = HashSet::new();
        let mut used = HashSet::from([self.time_column, self.label_column]);
        for loc in &self.locations {
            if !ids.insert(loc.id.to_lowercase()) {
                return err(format!("duplicate location id `{}`", loc.id));
            }
            if loc.triads.is_empty() {
                return err(format!("location `{}` has no channels", loc.id));
            }
            if let Some(a) = loc.aliases.iter().find(|a| a.to_lowercase() != **a) {
                return err(format!("alias `{a}` of `{}` is not lowercase", loc.id));
            }
            let mut triad_names = HashSet::new();
            for triad in &loc.triads {
                if !triad_names.insert(triad.name.as_str()) {
                    return err(format!("duplicate triad `{}` in `{}`", triad.name, loc.id));
                }
            }
            for c in loc.channel_columns() {
                if !in_range(c) {
                    return err(format!("column {c} of `{}` outside 1..={}", loc.id, self.n_columns));
                }
                if !used.insert(c) {
                    return err(format!("column {c} of `{}` is used twice", loc.id));
                }
            }
        }
        Ok(())
    }

    pub fn locations(&self) -> &[SensorLocation] {
        &self.locations
    }

    pub fn ids(&self) -> Vec<String> {
        self.locations.iter().map(|l| l.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&SensorLocation> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn labels(&self) -> &LabelTable {
        &self.labels
    }

    pub fn map_locomotion_label(&self, raw_code: i64) -> ActivityLabel {
        self.labels.map(raw_code)
    }

    /// Resolve a location id or natural-language description.
    ///
    /// Order: case-insensitive id, then exact name or alias, then the longest
    /// id, name or alias occurring inside the input at token boundaries.
    pub fn resolve(&self, name_or_alias: &str) -> Result<&SensorLocation, ResolveError> {
        let input = normalize(name_or_alias);
        if input.is_empty() {
            return Err(ResolveError::Unresolved(name_or_alias.to_string()));
        }

        if let Some(loc) = self.locations.iter().find(|l| l.id.to_lowercase() == input) {
            return Ok(loc);
        }

        let exact: Vec<&SensorLocation> = self
            .locations
            .iter()
            .filter(|l| normalize(&l.name) == input || l.aliases.iter().any(|a| normalize(a) == input))
            .collect();
        match exact.len() {
            0 => {}
            1 => return Ok(exact[0]),
            _ => return Err(ambiguous(name_or_alias, &exact)),
        }

        let mut best_len = 0;
        let mut best: Vec<&SensorLocation> = Vec::new();
        for loc in &self.locations {
            let keys = [loc.id.to_lowercase(), normalize(&loc.name)]
                .into_iter()
                .chain(loc.aliases.iter().map(|a| normalize(a)));
            let longest = keys
                .filter(|k| contains_token(&input, k))
                .map(|k| k.chars().count())
                .max();
            if let Some(len) = longest {
                if len > best_len {
                    best_len = len;
                    best = vec![loc];
                } else if len == best_len {
                    best.push(loc);
                }
            }
        }
        match best.len() {
            0 => Err(ResolveError::Unresolved(name_or_alias.to_string())),
            1 => Ok(best[0]),
            _ => Err(ambiguous(name_or_alias, &best)),
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} locations)", self.dataset, self.locations.len())
    }
}

fn ambiguous(input: &str, locs: &[&SensorLocation]) -> ResolveError {
    ResolveError::Ambiguous {
        input: input.to_string(),
        candidates: locs.iter().map(|l| l.id.clone()).collect(),
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// True when `needle` occurs in `haystack` bounded by non-alphanumerics.
pub(crate) fn contains_token(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let is_word = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric());
    haystack.match_indices(needle).any(|(start, m)| {
        let before = haystack[..start].chars().next_back();
        let after = haystack[start + m.len()..].chars().next();
        let first = m.chars().next();
        let last = m.chars().next_back();
        // Only demand a boundary where the needle itself starts/ends with a word char.
        (!is_word(first) || !is_word(before)) && (!is_word(last) || !is_word(after))
    })
}
