//! Prompt rendering and reply parsing for sensor and feature suggestions.

mod parse;
mod render;
mod template;

pub use parse::{parse_feature_suggestions, parse_sensor_suggestions, resolve_feature, SuggestionKind, SuggestionSet};
pub use render::{
    render_feature_prompt, render_sensor_prompt, summarize_confusions, task_description, top_confusions,
    PromptContext, SensorRef, Variant, DEFAULT_FEATURE_TASK, DEFAULT_ROLE, DEFAULT_SENSOR_TASK, FEATURE_SECTIONS,
    SENSOR_SECTIONS,
};
pub use template::{substitute, TemplateSet, TEMPLATE_FILES};

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("template `{name}`: {message}")]
    Template { name: String, message: String },
    #[error("prompt context: {0}")]
    Context(String),
    #[error("variant B needs an evaluation report")]
    MissingEvaluation,
}
