//! Reading OPPORTUNITY-format recordings.

mod catalog;
mod impute;
mod label;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use catalog::{Catalog, Modality, ResolveError, SensorLocation, Triad};
pub(crate) use catalog::contains_token as catalog_contains_token;
pub use impute::{impute_in_place, impute_missing};
pub use label::{ActivityLabel, LabelTable};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("empty sensor selection")]
    EmptySelection,
    #[error("unknown sensor location `{0}`")]
    UnknownLocation(String),
    #[error("invalid catalog: {0}")]
    Catalog(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: file contains no samples", .0.display())]
    EmptyFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub subject: String,
    pub run: String,
    pub source: PathBuf,
}

impl Provenance {
    /// Derive subject and run from an `S<n>-<run>.dat` file name.
    pub fn from_path(path: &Path) -> Self {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let (subject, run) = match stem.split_once('-') {
            Some((s, r)) => (s.to_string(), r.to_string()),
            None => (stem.to_string(), String::new()),
        };
        Provenance {
            subject,
            run,
            source: path.to_path_buf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriadSeries {
    pub name: String,
    pub modality: Modality,
    pub axes: [Vec<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationSeries {
    pub id: String,
    pub triads: Vec<TriadSeries>,
}

/// One recording file after channel selection and imputation.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub sample_rate_hz: f64,
    pub timestamps: Vec<f64>,
    pub locations: Vec<LocationSeries>,
    pub labels: Vec<ActivityLabel>,
    pub provenance: Provenance,
}

impl Recording {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn location(&self, id: &str) -> Option<&LocationSeries> {
        self.locations.iter().find(|l| l.id == id)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Overrides the catalog's sample rate.
    pub sample_rate_hz: Option<f64>,
}

/// Load one `.dat` file, keeping only the selected locations.
pub fn load_recording(
    path: &Path,
    selection: &[String],
    catalog: &Catalog,
    options: &LoadOptions,
) -> Result<Recording, IngestError> {
    if selection.is_empty() {
        return Err(IngestError::EmptySelection);
    }
    let locations: Vec<&SensorLocation> = selection
        .iter()
        .map(|id| catalog.get(id).ok_or_else(|| IngestError::UnknownLocation(id.clone())))
        .collect::<Result<_, _>>()?;

    let sample_rate_hz = options.sample_rate_hz.unwrap_or(catalog.sample_rate_hz);
    if sample_rate_hz.is_nan() || sample_rate_hz <= 0.0 {
        return Err(IngestError::Catalog(format!("sample rate must be positive, got {sample_rate_hz}")));
    }

    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;

    // 0-based column indices that are kept, in output order.
    let mut wanted: Vec<usize> = vec![catalog.time_column - 1, catalog.label_column - 1];
    for loc in &locations {
        wanted.extend(loc.channel_columns().map(|c| c - 1));
    }
    let max_wanted = wanted.iter().copied().max().unwrap_or(0);
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    // Position in `columns` for each file column, if kept.
    let mut slot: Vec<Option<usize>> = vec![None; max_wanted + 1];
    for (i, &c) in wanted.iter().enumerate() {
        slot[c] = Some(i);
    }

    let parse_err = |line: usize, message: String| IngestError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut width: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let mut n = 0;
        for (col, token) in line.split_ascii_whitespace().enumerate() {
            let value = parse_cell(token)
                .ok_or_else(|| parse_err(lineno, format!("column {}: `{token}` is not numeric", col + 1)))?;
            if let Some(Some(s)) = slot.get(col) {
                columns[*s].push(value);
            }
            n += 1;
        }
        match width {
            None => {
                if n <= max_wanted {
                    return Err(parse_err(
                        lineno,
                        format!("{n} columns, but the catalog needs at least {}", max_wanted + 1),
                    ));
                }
                width = Some(n);
            }
            Some(w) if w != n => {
                return Err(parse_err(lineno, format!("ragged row: {n} columns, expected {w}")));
            }
            Some(_) => {}
        }
    }
    if width.is_none() {
        return Err(IngestError::EmptyFile(path.to_path_buf()));
    }

    let mut columns = columns.into_iter();
    let mut timestamps = columns.next().expect("time column");
    let raw_labels = columns.next().expect("label column");

    impute_in_place(&mut timestamps);
    if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
        return Err(parse_err(i + 2, "timestamps decrease".into()));
    }

    let labels = raw_labels
        .iter()
        .map(|&v| if v.is_finite() { catalog.map_locomotion_label(v as i64) } else { ActivityLabel::Others })
        .collect();

    let locations = locations
        .iter()
        .map(|loc| LocationSeries {
            id: loc.id.clone(),
            triads: loc
                .triads
                .iter()
                .map(|t| {
                    let mut axis = || {
                        let mut s = columns.next().expect("one series per catalog column");
                        impute_in_place(&mut s);
                        s
                    };
                    TriadSeries {
                        name: t.name.clone(),
                        modality: t.modality,
                        axes: [axis(), axis(), axis()],
                    }
                })
                .collect(),
        })
        .collect();

    Ok(Recording {
        sample_rate_hz,
        timestamps,
        locations,
        labels,
        provenance: Provenance::from_path(path),
    })
}

fn parse_cell(token: &str) -> Option<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_infinite() => None,
        Ok(v) => Some(v),
        Err(_) => None,
    }
}

/// A dataset file discovered on disk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DatasetFile {
    pub subject: String,
    pub run: String,
    pub path: PathBuf,
}

/// Find every `S<n>-<run>.dat` file below `root`, sorted by (subject, run).
pub fn discover_files(root: &Path) -> Result<Vec<DatasetFile>, IngestError> {
    if !root.is_dir() {
        return Err(IngestError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "dataset root is not a directory"),
        });
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(true).sort_by_file_name() {
        let entry = entry.map_err(|e| IngestError::Io {
            path: root.to_path_buf(),
            source: e.into(),
        })?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().and_then(|e| e.to_str()) != Some("dat") {
            continue;
        }
        let prov = Provenance::from_path(path);
        if prov.run.is_empty() || !prov.subject.starts_with('S') {
            continue;
        }
        files.push(DatasetFile {
            subject: prov.subject,
            run: prov.run,
            path: path.to_path_buf(),
        });
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tiny_catalog() -> Catalog {
        Catalog::from_toml_str(
            r#"
            version = 1
            time_column = 1
            label_column = 5
            n_columns = 5
            sample_rate_hz = 30.0
            [[labels]]
            code = 1
            label = "Stand"
            [[locations]]
            id = "X"
            name = "x"
            aliases = ["thing"]
            triads = [{ name = "acc", modality = "acc", columns = [2, 3, 4] }]
            "#,
        )
        .unwrap()
    }

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = std::fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn loads_and_imputes() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "S1-ADL1.dat", "0 1.0 0 0 1\n33 NaN 0 0 1\n66 3.0 0 0 0\n");
        let rec = load_recording(&p, &["X".into()], &tiny_catalog(), &LoadOptions::default()).unwrap();
        assert_eq!(rec.len(), 3);
        assert_eq!(rec.locations[0].triads[0].axes[0], [1.0, 2.0, 3.0]);
        assert_eq!(rec.labels, [ActivityLabel::Stand, ActivityLabel::Stand, ActivityLabel::Others]);
        assert_eq!(rec.timestamps, [0.0, 33.0, 66.0]);
        assert_eq!(rec.provenance.subject, "S1");
        assert_eq!(rec.provenance.run, "ADL1");
        assert_eq!(rec.sample_rate_hz, 30.0);
    }

    #[test]
    fn error_paths() {
        let dir = tempfile::tempdir().unwrap();
        let cat = tiny_catalog();
        let opts = LoadOptions::default();
        let good = write(dir.path(), "S1-ADL1.dat", "0 1 2 3 0\n");

        assert!(matches!(load_recording(&good, &[], &cat, &opts), Err(IngestError::EmptySelection)));
        match load_recording(&good, &["NOPE".into()], &cat, &opts) {
            Err(IngestError::UnknownLocation(id)) => assert_eq!(id, "NOPE"),
            other => panic!("{other:?}"),
        }

        let ragged = write(dir.path(), "S1-ADL2.dat", "0 1 2 3 0\n33 1 2 3 0 9\n");
        match load_recording(&ragged, &["X".into()], &cat, &opts) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }

        let bad = write(dir.path(), "S1-ADL3.dat", "0 1 2 3 0\n\n33 1 x 3 0\n");
        match load_recording(&bad, &["X".into()], &cat, &opts) {
            Err(IngestError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("column 3"), "{message}");
            }
            other => panic!("{other:?}"),
        }

        let empty = write(dir.path(), "S1-ADL4.dat", "\n \n");
        assert!(matches!(load_recording(&empty, &["X".into()], &cat, &opts), Err(IngestError::EmptyFile(_))));

        let narrow = write(dir.path(), "S1-ADL5.dat", "0 1 2\n");
        assert!(matches!(load_recording(&narrow, &["X".into()], &cat, &opts), Err(IngestError::Parse { .. })));

        let missing = dir.path().join("nope.dat");
        assert!(matches!(load_recording(&missing, &["X".into()], &cat, &opts), Err(IngestError::Io { .. })));
    }

    #[test]
    fn discovers_subject_run_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("dataset")).unwrap();
        for name in ["S2-ADL1.dat", "S1-Drill.dat", "S1-ADL1.dat", "notes.txt", "column_names.dat"] {
            write(&dir.path().join("dataset"), name, "");
        }
        let files = discover_files(dir.path()).unwrap();
        let names: Vec<_> = files.iter().map(|f| format!("{}-{}", f.subject, f.run)).collect();
        assert_eq!(names, ["S1-ADL1", "S1-Drill", "S2-ADL1"]);
        assert!(discover_files(&dir.path().join("missing")).is_err());
    }
}
