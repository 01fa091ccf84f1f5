//! Classifier training, prediction and evaluation.

mod forest;
mod metrics;
mod split;

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use forest::{Forest, ForestParams, MaxFeatures, Node, Tree};
pub use metrics::{evaluate, EvaluationReport, PerClass};
pub use split::{split_train_test, SplitProtocol};

use crate::features::FeatureMatrix;
use crate::ingest::ActivityLabel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("training data: {0}")]
    Training(String),
    #[error("feature schema mismatch (missing: [{}], extra: [{}]{})",
        missing.join(", "), extra.join(", "), if *reordered { ", columns reordered" } else { "" })]
    SchemaMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
        reordered: bool,
    },
    #[error("{predicted} predictions for {truth} truth labels")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("split: {0}")]
    Split(String),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// SHA-256 over the ordered column names.
pub fn schema_fingerprint(columns: &[String]) -> String {
    let mut h = Sha256::new();
    for c in columns {
        h.update(c.as_bytes());
        h.update([0u8]);
    }
    hex(&h.finalize())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub algorithm: String,
    pub params: ForestParams,
    pub seed: u64,
    pub schema: Vec<String>,
    pub schema_fingerprint: String,
    pub forest: Forest,
}

pub fn train(features: &FeatureMatrix, params: &ForestParams, seed: u64) -> Result<TrainedModel, ModelError> {
    let n = features.n_rows();
    if n < 10 {
        return Err(ModelError::Training(format!("need at least 10 rows, got {n}")));
    }
    if features.labels.len() != n {
        return Err(ModelError::Training("label column length differs from row count".into()));
    }
    if features.n_cols() == 0 {
        return Err(ModelError::Training("no feature columns".into()));
    }
    let mut distinct = features.labels.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(ModelError::Training(format!(
            "need at least 2 distinct labels, got {}",
            distinct.len()
        )));
    }
    if params.n_trees == 0 {
        return Err(ModelError::Training("n_trees must be positive".into()));
    }
    for (i, row) in features.rows.iter().enumerate() {
        if row.len() != features.n_cols() {
            return Err(ModelError::Training(format!("row {i} has {} cells", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::Training(format!(
                "non-finite value in row {i}, column `{}`",
                features.columns[j]
            )));
        }
    }
    let classes: Vec<usize> = features.labels.iter().map(|l| l.index()).collect();
    let forest = Forest::fit(&features.rows, &classes, params, seed);
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        algorithm: "random_forest".into(),
        params: params.clone(),
        seed,
        schema: features.columns.clone(),
        schema_fingerprint: schema_fingerprint(&features.columns),
        forest,
    })
}

impl TrainedModel {
    pub fn check_schema(&self, columns: &[String]) -> Result<(), ModelError> {
        if schema_fingerprint(columns) == self.schema_fingerprint {
            return Ok(());
        }
        let missing: Vec<String> = self.schema.iter().filter(|c| !columns.contains(c)).cloned().collect();
        let extra: Vec<String> = columns.iter().filter(|c| !self.schema.contains(c)).cloned().collect();
        let reordered = missing.is_empty() && extra.is_empty();
        Err(ModelError::SchemaMismatch {
            missing,
            extra,
            reordered,
        })
    }

    pub fn predict(&self, features: &FeatureMatrix) -> Result<Vec<ActivityLabel>, ModelError> {
        self.check_schema(&features.columns)?;
        Ok(features
            .rows
            .iter()
            .map(|r| ActivityLabel::from_index(self.forest.predict(r)).expect("class index in range"))
            .collect())
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let json = serde_json::to_string(self).map_err(|e| ModelError::Format(e.to_string()))?;
        crate::store::write_atomic(path, json.as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        let model: TrainedModel = serde_json::from_str(&text).map_err(|e| ModelError::Format(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        if schema_fingerprint(&model.schema) != model.schema_fingerprint {
            return Err(ModelError::Format("schema fingerprint does not match schema".into()));
        }
        Ok(model)
    }
}
