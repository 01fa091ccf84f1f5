//! Preset experiments, config derivation and the synthetic dataset.

mod apply;
mod config;
mod preset;
mod reproduce;
mod run;
mod synth;

pub use apply::{apply_suggestions, ApplyMode};
pub use config::{ExperimentConfig, DEFAULT_SEED};
pub use preset::{PresetId, SensorSet, BASELINE_SENSORS, PIONEER_A_SENSORS, PIONEER_B_SENSORS};
pub use reproduce::{compare, ClaimCheck, PresetComparison, ReproductionReport, DEVIATION_LIMIT};
pub use run::{run, run_and_store, ExperimentReport, Headline, REPORT_FORMAT_VERSION};
pub use synth::{synthesize_dataset, SynthOptions, SYNTH_RUNS};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("{stage} ({file}): {message}")]
    Stage {
        stage: &'static str,
        file: String,
        message: String,
    },
    #[error("{stage}: {message}")]
    Model { stage: &'static str, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl ExperimentError {
    fn stage(stage: &'static str, e: crate::model::ModelError) -> Self {
        ExperimentError::Model {
            stage,
            message: e.to_string(),
        }
    }
}
