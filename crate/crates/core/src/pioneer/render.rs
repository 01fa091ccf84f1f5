use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::template::TemplateSet;
use super::PromptError;
use crate::features::FeatureSpec;
use crate::ingest::{ActivityLabel, Catalog};
use crate::model::EvaluationReport;

pub const DEFAULT_ROLE: &str = "You are an expert in human activity recognition with wearable sensors. \
You know human biomechanics well and have years of experience designing sensor setups and \
signal features for accelerometer and IMU (acc, gyro, magnetometer) data.";

pub const DEFAULT_SENSOR_TASK: &str = "Suggest the body positions where we should place sensors \
to recognize the activity labels above more accurately.";

pub const DEFAULT_FEATURE_TASK: &str = "Suggest new feature calculations, beyond the ones we \
already compute, that would help recognize the activity labels above more accurately.";

/// Which sensor-pioneering prompt to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Without the "Current result" section (before data collection).
    A,
    /// With the "Current result" section (after a first model exists).
    B,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            _ => Err(format!("unknown prompt variant `{s}` (expected A or B)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorRef {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptContext {
    pub role_text: String,
    pub task_description: String,
    pub label_names: Vec<String>,
    /// Optional one-line description per label, in label order.
    pub label_descriptions: Option<Vec<String>>,
    pub current_sensor_locations: Vec<SensorRef>,
    pub current_features: Vec<String>,
    pub evaluation: Option<EvaluationReport>,
    pub task_instruction: String,
    pub feature_task_instruction: String,
}

pub fn task_description(window_s: f64, overlap_frac: f64, sample_rate_hz: f64) -> String {
    format!(
        "We are building a machine learning model that recognizes a person's mode of locomotion \
from body-worn sensors. The data are 3-axis accelerometer and IMU (acc, gyro, magnetic field) \
signals sampled at {sample_rate_hz} Hz while people go through everyday activities. The signals \
are cut into {window_s}-second sliding windows with {:.0}% overlap, features are computed for each \
window, and a classifier predicts one activity label per window. The data have already been \
collected and a first model trained; we want to collect further data to improve its accuracy.",
        overlap_frac * 100.0
    )
}

impl PromptContext {
    /// Context for the given sensor selection and feature set, with default
    /// role, task text and window settings.
    pub fn new(
        catalog: &Catalog,
        sensor_ids: &[String],
        features: &[FeatureSpec],
        evaluation: Option<EvaluationReport>,
    ) -> Result<Self, PromptError> {
        let current_sensor_locations = sensor_ids
            .iter()
            .map(|id| {
                catalog
                    .get(id)
                    .map(|l| SensorRef {
                        id: l.id.clone(),
                        name: l.name.clone(),
                    })
                    .ok_or_else(|| PromptError::Context(format!("unknown sensor location `{id}`")))
            })
            .collect::<Result<_, _>>()?;
        let mut current_features: Vec<String> = Vec::new();
        for f in features {
            let name = f.name.display_name().to_string();
            if !current_features.contains(&name) {
                current_features.push(name);
            }
        }
        Ok(Self {
            role_text: DEFAULT_ROLE.into(),
            task_description: task_description(5.0, 0.3, catalog.sample_rate_hz),
            label_names: ActivityLabel::ALL.iter().map(|l| l.name().to_string()).collect(),
            label_descriptions: None,
            current_sensor_locations,
            current_features,
            evaluation,
            task_instruction: DEFAULT_SENSOR_TASK.into(),
            feature_task_instruction: DEFAULT_FEATURE_TASK.into(),
        })
    }

    /// Describe a different window setup in the problem section.
    pub fn with_window(mut self, window_s: f64, overlap_frac: f64, sample_rate_hz: f64) -> Self {
        self.task_description = task_description(window_s, overlap_frac, sample_rate_hz);
        self
    }

    fn check_labels(&self) -> Result<(), PromptError> {
        let expected: Vec<&str> = ActivityLabel::ALL.iter().map(|l| l.name()).collect();
        if self.label_names != expected {
            return Err(PromptError::Context(format!(
                "label names must be exactly {expected:?}, got {:?}",
                self.label_names
            )));
        }
        if let Some(d) = &self.label_descriptions {
            if d.len() != self.label_names.len() {
                return Err(PromptError::Context("one description per label is required".into()));
            }
        }
        Ok(())
    }

    fn values(&self) -> BTreeMap<&'static str, String> {
        let label_list = self
            .label_names
            .iter()
            .enumerate()
            .map(|(i, name)| match self.label_descriptions.as_ref().map(|d| d[i].trim()) {
                Some(desc) if !desc.is_empty() => format!("- {name}: {desc}"),
                _ => format!("- {name}"),
            })
            .collect::<Vec<_>>()
            .join("\n");
        let sensor_list = self
            .current_sensor_locations
            .iter()
            .map(|s| format!("- {} ({})", s.name, s.id))
            .collect::<Vec<_>>()
            .join("\n");
        let sensor_names = self
            .current_sensor_locations
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        let feature_list = self
            .current_features
            .iter()
            .map(|f| format!("- {f}"))
            .collect::<Vec<_>>()
            .join("\n");
        BTreeMap::from([
            ("role_text", self.role_text.clone()),
            ("task_description", self.task_description.clone()),
            ("label_count", self.label_names.len().to_string()),
            ("label_list", label_list),
            ("sensor_count", self.current_sensor_locations.len().to_string()),
            ("sensor_list", sensor_list),
            ("sensor_names", sensor_names),
            ("feature_names", join_words(&self.current_features)),
            ("feature_list", feature_list),
            ("task_instruction", self.task_instruction.clone()),
            ("feature_task_instruction", self.feature_task_instruction.clone()),
        ])
    }
}

fn join_words(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    }
}

fn assemble(sections: &[(&str, String)]) -> String {
    sections
        .iter()
        .map(|(title, body)| format!("## {title}\n{body}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub const SENSOR_SECTIONS: [&str; 6] = [
    "Your role",
    "The problem you need to solve",
    "Output activity labels",
    "Current features",
    "Current result",
    "Your task",
];

pub const FEATURE_SECTIONS: [&str; 4] = [
    "The problem you need to solve",
    "Output activity labels",
    "Current features",
    "Your task",
];

/// Render the sensor-pioneering prompt. Variant B adds "Current result".
pub fn render_sensor_prompt(
    templates: &TemplateSet,
    ctx: &PromptContext,
    variant: Variant,
) -> Result<String, PromptError> {
    ctx.check_labels()?;
    if ctx.current_sensor_locations.is_empty() {
        return Err(PromptError::Context("no current sensor locations".into()));
    }
    let mut values = ctx.values();
    let mut sections = vec![
        (SENSOR_SECTIONS[0], templates.render("role.txt", &values)?),
        (SENSOR_SECTIONS[1], templates.render("problem.txt", &values)?),
        (SENSOR_SECTIONS[2], templates.render("labels.txt", &values)?),
        (SENSOR_SECTIONS[3], templates.render("sensor_locations.txt", &values)?),
    ];
    if variant == Variant::B {
        let report = ctx.evaluation.as_ref().ok_or(PromptError::MissingEvaluation)?;
        values.insert("result_summary", summarize_confusions(report, 3));
        sections.push((SENSOR_SECTIONS[4], templates.render("current_result.txt", &values)?));
    }
    sections.push((SENSOR_SECTIONS[5], templates.render("sensor_task.txt", &values)?));
    Ok(assemble(&sections))
}

/// Render the feature-augmentation prompt (four sections).
pub fn render_feature_prompt(templates: &TemplateSet, ctx: &PromptContext) -> Result<String, PromptError> {
    ctx.check_labels()?;
    if ctx.current_features.is_empty() {
        return Err(PromptError::Context("no current features".into()));
    }
    let values = ctx.values();
    let sections = [
        (FEATURE_SECTIONS[0], templates.render("problem.txt", &values)?),
        (FEATURE_SECTIONS[1], templates.render("labels.txt", &values)?),
        (FEATURE_SECTIONS[2], templates.render("computed_features.txt", &values)?),
        (FEATURE_SECTIONS[3], templates.render("feature_task.txt", &values)?),
    ];
    Ok(assemble(&sections))
}

/// The `top_k` largest off-diagonal cells, as (truth, predicted, count),
/// count descending, ties in class order.
pub fn top_confusions(report: &EvaluationReport, top_k: usize) -> Vec<(ActivityLabel, ActivityLabel, u64)> {
    let mut cells: Vec<(ActivityLabel, ActivityLabel, u64)> = Vec::new();
    for t in ActivityLabel::ALL {
        for p in ActivityLabel::ALL {
            let count = report.confusion[t.index()][p.index()];
            if t != p && count > 0 {
                cells.push((t, p, count));
            }
        }
    }
    // stable sort keeps class order among equal counts
    cells.sort_by_key(|c| std::cmp::Reverse(c.2));
    cells.truncate(top_k);
    cells
}

/// Accuracy/F1 line followed by the most frequent misclassifications.
pub fn summarize_confusions(report: &EvaluationReport, top_k: usize) -> String {
    let mut out = format!(
        "Overall accuracy is {:.1}% and macro F1-score is {:.1}% over {} windows.\n",
        report.accuracy * 100.0,
        report.macro_f1 * 100.0,
        report.n_windows
    );
    let cells = top_confusions(report, top_k);
    if cells.is_empty() {
        out.push_str("There are no frequent misclassifications.");
        return out;
    }
    out.push_str("The most frequent misclassifications are:");
    let support = report.support();
    for (t, p, count) in cells {
        let pct = 100.0 * count as f64 / support[t.index()] as f64;
        out.push_str(&format!(
            "\n- {t} is often misclassified as {p} ({count} windows, {pct:.1}% of {t})"
        ));
    }
    out
}
