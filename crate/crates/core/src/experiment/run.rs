use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentError};
use crate::features::{ChannelLayout, FeatureMatrix, Featurizer};
use crate::ingest::{discover_files, load_recording, ActivityLabel, DatasetFile, LoadOptions};
use crate::model::{evaluate, split_train_test, train, EvaluationReport};
use crate::store::{IndexEntry, ResultsStore};
use crate::windowing::{segment_with, WindowGeometry};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub config_fingerprint: String,
    pub sensors: Vec<String>,
    pub features: Vec<String>,
    pub n_columns: usize,
    pub train_files: Vec<String>,
    pub test_files: Vec<String>,
    pub train_windows: usize,
    /// Evaluation over all test windows together.
    pub pooled: EvaluationReport,
    pub per_subject: BTreeMap<String, EvaluationReport>,
    /// Unweighted mean of the per-subject scores.
    pub per_subject_mean: Headline,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Io(format!("bad report: {e}")))
    }

    /// Human-readable summary table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset        {p}\n"));
        }
        out.push_str(&format!("config        {}\n", &self.config_fingerprint[..16.min(self.config_fingerprint.len())]));
        out.push_str(&format!("sensors       {}\n", self.sensors.join(" ")));
        out.push_str(&format!("features      {}\n", self.features.join(" ")));
        out.push_str(&format!(
            "windows       {} train / {} test, {} columns\n",
            self.train_windows, self.pooled.n_windows, self.n_columns
        ));
        out.push_str(&format!("acc / F1      {}\n\n", self.pooled.headline()));
        out.push_str(&format!("{:<8}{:>8}\n", "class", "F1"));
        for l in ActivityLabel::ALL {
            out.push_str(&format!("{:<8}{:>7.1}%\n", l.name(), 100.0 * self.pooled.per_class_f1.get(l)));
        }
        out.push_str(&format!("\n{:<8}", "truth"));
        for l in ActivityLabel::ALL {
            out.push_str(&format!("{:>8}", l.name()));
        }
        out.push('\n');
        for t in ActivityLabel::ALL {
            out.push_str(&format!("{:<8}", t.name()));
            for p in ActivityLabel::ALL {
                out.push_str(&format!("{:>8}", self.pooled.confusion[t.index()][p.index()]));
            }
            out.push('\n');
        }
        if !self.per_subject.is_empty() {
            out.push_str(&format!("\n{:<8}{:>8}{:>8}{:>8}\n", "subject", "acc", "F1", "windows"));
            for (s, r) in &self.per_subject {
                out.push_str(&format!(
                    "{:<8}{:>7.1}%{:>7.1}%{:>8}\n",
                    s,
                    100.0 * r.accuracy,
                    100.0 * r.macro_f1,
                    r.n_windows
                ));
            }
            out.push_str(&format!(
                "{:<8}{:>7.1}%{:>7.1}%\n",
                "mean",
                100.0 * self.per_subject_mean.accuracy,
                100.0 * self.per_subject_mean.macro_f1
            ));
        }
        out
    }
}

fn file_name(f: &DatasetFile) -> String {
    format!("{}-{}", f.subject, f.run)
}

fn select_subjects(files: Vec<DatasetFile>, globs: &[String]) -> Result<Vec<DatasetFile>, ExperimentError> {
    let patterns = globs
        .iter()
        .map(|g| glob::Pattern::new(g).map_err(|e| ExperimentError::Config(format!("bad subject glob `{g}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(files
        .into_iter()
        .filter(|f| patterns.iter().any(|p| p.matches(&f.subject)))
        .collect())
}

/// Load, window and featurize every file, keeping file order.
fn featurize_files(
    files: &[DatasetFile],
    config: &ExperimentConfig,
    catalog: &crate::ingest::Catalog,
) -> Result<FeatureMatrix, ExperimentError> {
    let geom = WindowGeometry::new(config.window_s, config.overlap_frac, config.sample_rate_hz)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let options = LoadOptions {
        sample_rate_hz: Some(config.sample_rate_hz),
    };
    let parts: Vec<FeatureMatrix> = files
        .par_iter()
        .map(|f| {
            let stage = |stage: &'static str, message: String| ExperimentError::Stage {
                stage,
                file: file_name(f),
                message,
            };
            let rec = load_recording(&f.path, &config.sensors, catalog, &options)
                .map_err(|e| stage("ingest", e.to_string()))?;
            let windows = segment_with(&rec, geom).map_err(|e| stage("windowing", e.to_string()))?;
            let fz = Featurizer::new(&config.features, ChannelLayout::of(&rec))
                .map_err(|e| stage("features", e.to_string()))?;
            let mut m = FeatureMatrix::new(fz.columns().to_vec());
            for w in &windows {
                if config.drop_others && w.label == ActivityLabel::Others {
                    continue;
                }
                let row = fz.featurize(w).map_err(|e| stage("features", format!("window at {}: {e}", w.start)))?;
                m.push(row, w.label, &f.subject);
            }
            Ok(m)
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut parts = parts.into_iter();
    let mut all = parts.next().ok_or_else(|| ExperimentError::Dataset("no files".into()))?;
    for p in parts {
        if p.columns != all.columns {
            return Err(ExperimentError::Dataset("recordings produced different feature schemas".into()));
        }
        all.extend(p);
    }
    Ok(all)
}

/// Run the whole pipeline for one config. The result depends only on the
/// config and the dataset bytes.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let catalog = config.load_catalog()?;
    config.validate(&catalog)?;
    let files = discover_files(&config.dataset_root).map_err(|e| ExperimentError::Dataset(e.to_string()))?;
    let files = select_subjects(files, &config.subjects)?;
    if files.is_empty() {
        return Err(ExperimentError::Dataset(format!(
            "no recordings matching {:?} under {}",
            config.subjects,
            config.dataset_root.display()
        )));
    }
    let (train_files, test_files) = split_train_test(&files, &config.split)
        .map_err(|e| ExperimentError::Dataset(e.to_string()))?;

    let train_m = featurize_files(&train_files, config, &catalog)?;
    let test_m = featurize_files(&test_files, config, &catalog)?;
    if test_m.n_rows() == 0 {
        return Err(ExperimentError::Dataset("no test windows".into()));
    }

    let model = train(&train_m, &config.classifier, config.seed).map_err(|e| ExperimentError::stage("training", e))?;
    let predicted = model.predict(&test_m).map_err(|e| ExperimentError::stage("prediction", e))?;
    let fingerprint = config.fingerprint();
    let mut pooled = evaluate(&predicted, &test_m.labels).map_err(|e| ExperimentError::stage("evaluation", e))?;
    pooled.config_fingerprint = Some(fingerprint.clone());

    let mut per_subject = BTreeMap::new();
    let subjects: std::collections::BTreeSet<&String> = test_m.groups.iter().collect();
    for s in subjects {
        let idx: Vec<usize> = (0..test_m.n_rows()).filter(|&i| &test_m.groups[i] == s).collect();
        let p: Vec<ActivityLabel> = idx.iter().map(|&i| predicted[i]).collect();
        let t: Vec<ActivityLabel> = idx.iter().map(|&i| test_m.labels[i]).collect();
        let r = evaluate(&p, &t).map_err(|e| ExperimentError::stage("evaluation", e))?;
        per_subject.insert(s.clone(), r);
    }
    let n = per_subject.len() as f64;
    let per_subject_mean = Headline {
        accuracy: per_subject.values().map(|r| r.accuracy).sum::<f64>() / n,
        macro_f1: per_subject.values().map(|r| r.macro_f1).sum::<f64>() / n,
    };

    Ok(ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        preset: config.preset.clone(),
        config_fingerprint: fingerprint,
        sensors: config.sensors.clone(),
        features: config.features.iter().map(|f| f.name.id().to_string()).collect(),
        n_columns: train_m.n_cols(),
        train_files: train_files.iter().map(file_name).collect(),
        test_files: test_files.iter().map(file_name).collect(),
        train_windows: train_m.n_rows(),
        pooled,
        per_subject,
        per_subject_mean,
    })
}

/// Run and write `<fingerprint>.json` plus its config into the store.
pub fn run_and_store(
    config: &ExperimentConfig,
    store: &ResultsStore,
) -> Result<(ExperimentReport, std::path::PathBuf), ExperimentError> {
    let report = run(config)?;
    let entry = IndexEntry {
        preset: report.preset.clone(),
        accuracy: report.pooled.accuracy,
        macro_f1: report.pooled.macro_f1,
        report: format!("{}.json", report.config_fingerprint),
    };
    let path = store
        .put(&report.config_fingerprint, &report.to_json(), &config.to_toml_string(), entry)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", store.root().display())))?;
    Ok((report, path))
}
