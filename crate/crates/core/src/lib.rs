//! Sensor and feature pioneering for wearable human activity recognition.
//!
//! The pipeline reads OPPORTUNITY-format recordings, cuts them into sliding
//! windows, computes per-window features and trains a random forest on the
//! five locomotion classes. The `pioneer` and `llm` modules render structured
//! prompts that ask a chat model where to add sensors and which features to
//! compute, and turn the replies into new experiment configurations.

pub mod features;
pub mod cli;
pub mod experiment;
pub mod ingest;
pub mod llm;
pub mod model;
pub mod pioneer;
pub mod store;
pub mod windowing;
