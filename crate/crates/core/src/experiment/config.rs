use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentError;
use crate::features::FeatureSpec;
use crate::ingest::Catalog;
use crate::model::{hex, ForestParams, SplitProtocol};

pub const DEFAULT_SEED: u64 = 42;

fn default_subjects() -> Vec<String> {
    vec!["S*".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub dataset_root: PathBuf,
    /// Globs over subject names (`S1`, `S2`, ...).
    #[serde(default = "default_subjects")]
    pub subjects: Vec<String>,
    /// Catalog file; the built-in OPPORTUNITY catalog when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
    pub sensors: Vec<String>,
    pub window_s: f64,
    pub overlap_frac: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
    /// Drop windows labelled Others from training and test.
    #[serde(default)]
    pub drop_others: bool,
    /// Notes on how this config was derived; not part of the fingerprint.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub classifier: ForestParams,
    #[serde(default)]
    pub split: SplitProtocol,
}

impl ExperimentConfig {
    pub fn new(dataset_root: impl Into<PathBuf>, sensors: Vec<String>, features: Vec<FeatureSpec>) -> Self {
        Self {
            preset: None,
            dataset_root: dataset_root.into(),
            subjects: default_subjects(),
            catalog: None,
            sensors,
            window_s: 5.0,
            overlap_frac: 0.3,
            sample_rate_hz: 30.0,
            seed: DEFAULT_SEED,
            drop_others: false,
            provenance: Vec::new(),
            features,
            classifier: ForestParams::default(),
            split: SplitProtocol::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn save(&self, path: &Path) -> Result<(), ExperimentError> {
        crate::store::write_atomic(path, self.to_toml_string().as_bytes())
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON form (sorted keys), without provenance.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.provenance.clear();
        let value = serde_json::to_value(&c).expect("config serializes");
        hex(&Sha256::digest(value.to_string().as_bytes()))
    }

    pub fn load_catalog(&self) -> Result<Catalog, ExperimentError> {
        match &self.catalog {
            None => Ok(Catalog::opportunity()),
            Some(p) => Catalog::load(p).map_err(|e| ExperimentError::Config(e.to_string())),
        }
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<(), ExperimentError> {
        let err = |m: String| Err(ExperimentError::Config(m));
        if self.sensors.is_empty() {
            return err("no sensor locations selected".into());
        }
        for (i, s) in self.sensors.iter().enumerate() {
            if catalog.get(s).is_none() {
                return err(format!("unknown sensor location `{s}`"));
            }
            if self.sensors[..i].contains(s) {
                return err(format!("sensor location `{s}` listed twice"));
            }
        }
        if self.features.is_empty() {
            return err("no features selected".into());
        }
        for (i, f) in self.features.iter().enumerate() {
            f.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
            if self.features[..i].iter().any(|g| g.name == f.name) {
                return err(format!("feature `{}` listed twice", f.name.id()));
            }
        }
        if self.subjects.is_empty() {
            return err("no subject globs".into());
        }
        if self.sample_rate_hz.is_nan() || self.sample_rate_hz <= 0.0 {
            return err(format!("sample_rate_hz must be positive, got {}", self.sample_rate_hz));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{augmented_specs, baseline_specs};

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::new("/data", vec!["HIP".into()], augmented_specs());
        c.preset = Some("c".into());
        c.provenance.push("note".into());
        let text = c.to_toml_string();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn fingerprint_ignores_provenance_only() {
        let a = ExperimentConfig::new("/data", vec!["HIP".into()], baseline_specs());
        let mut b = a.clone();
        b.provenance.push("x".into());
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.seed += 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn validation() {
        let cat = Catalog::opportunity();
        let ok = ExperimentConfig::new("/d", vec!["HIP".into()], baseline_specs());
        ok.validate(&cat).unwrap();
        let mut bad = ok.clone();
        bad.sensors.push("TAIL".into());
        assert!(bad.validate(&cat).is_err());
        let mut bad = ok.clone();
        bad.features.clear();
        assert!(bad.validate(&cat).is_err());
        let mut bad = ok;
        bad.sensors.push("HIP".into());
        assert!(bad.validate(&cat).is_err());
    }
}
