use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentError};
use crate::features::{FeatureKind, FeatureSpec};
use crate::pioneer::{SuggestionKind, SuggestionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApplyMode {
    /// Add suggested items to the current ones.
    #[default]
    Union,
    /// Use exactly the suggested items.
    Replace,
}

/// Derive a new config from reviewed suggestions. The input is not modified.
pub fn apply_suggestions(
    config: &ExperimentConfig,
    suggestions: &SuggestionSet,
    mode: ApplyMode,
) -> Result<ExperimentConfig, ExperimentError> {
    if suggestions.resolved.is_empty() {
        return Err(ExperimentError::Config("the suggestion set has no resolved entries".into()));
    }
    let mut next = config.clone();
    match suggestions.kind {
        SuggestionKind::Sensor => {
            let catalog = config.load_catalog()?;
            let mut ids = Vec::new();
            for r in &suggestions.resolved {
                let loc = catalog
                    .get(r)
                    .ok_or_else(|| ExperimentError::Config(format!("suggested location `{r}` is not in the catalog")))?;
                ids.push(loc.id.clone());
            }
            if mode == ApplyMode::Replace {
                next.sensors.clear();
            }
            for id in ids {
                if !next.sensors.contains(&id) {
                    next.sensors.push(id);
                }
            }
        }
        SuggestionKind::Feature => {
            let mut kinds = Vec::new();
            for r in &suggestions.resolved {
                kinds.push(r.parse::<FeatureKind>().map_err(|e| ExperimentError::Config(e.to_string()))?);
            }
            if mode == ApplyMode::Replace {
                next.features.retain(|f| kinds.contains(&f.name));
            }
            for k in kinds {
                if !next.features.iter().any(|f| f.name == k) {
                    next.features.push(FeatureSpec::new(k));
                }
            }
        }
    }
    if next.sensors != config.sensors || next.features != config.features {
        next.preset = None;
    }
    let kind = match suggestions.kind {
        SuggestionKind::Sensor => "sensor",
        SuggestionKind::Feature => "feature",
    };
    let note = format!("applied {kind} suggestions {}", suggestions.fingerprint());
    if !next.provenance.contains(&note) {
        next.provenance.push(note);
    }
    Ok(next)
}
