//! Plain-text templates with `{{name}}` placeholders.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::PromptError;

/// Section template files, by file name.
pub const TEMPLATE_FILES: [&str; 8] = [
    "role.txt",
    "problem.txt",
    "labels.txt",
    "sensor_locations.txt",
    "current_result.txt",
    "sensor_task.txt",
    "computed_features.txt",
    "feature_task.txt",
];

const EMBEDDED: [(&str, &str); 8] = [
    ("role.txt", include_str!("../../templates/role.txt")),
    ("problem.txt", include_str!("../../templates/problem.txt")),
    ("labels.txt", include_str!("../../templates/labels.txt")),
    ("sensor_locations.txt", include_str!("../../templates/sensor_locations.txt")),
    ("current_result.txt", include_str!("../../templates/current_result.txt")),
    ("sensor_task.txt", include_str!("../../templates/sensor_task.txt")),
    ("computed_features.txt", include_str!("../../templates/computed_features.txt")),
    ("feature_task.txt", include_str!("../../templates/feature_task.txt")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    files: BTreeMap<String, String>,
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self {
            files: EMBEDDED.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl TemplateSet {
    /// Load templates from a directory; files missing there fall back to the
    /// built-in versions.
    pub fn load_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = Self::default();
        for name in TEMPLATE_FILES {
            let path = dir.join(name);
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|e| PromptError::Template {
                    name: name.to_string(),
                    message: e.to_string(),
                })?;
                set.files.insert(name.to_string(), text);
            }
        }
        Ok(set)
    }

    pub fn get(&self, name: &str) -> Result<&str, PromptError> {
        self.files.get(name).map(String::as_str).ok_or_else(|| PromptError::Template {
            name: name.to_string(),
            message: "no such template".into(),
        })
    }

    pub fn render(&self, name: &str, values: &BTreeMap<&str, String>) -> Result<String, PromptError> {
        substitute(self.get(name)?, values).map_err(|placeholder| PromptError::Template {
            name: name.to_string(),
            message: format!("no value for placeholder `{placeholder}`"),
        })
    }
}

fn placeholder() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\{\{\s*([A-Za-z0-9_]+)\s*\}\}").unwrap())
}

/// Replace every placeholder; the first one without a value is returned as the error.
pub fn substitute(template: &str, values: &BTreeMap<&str, String>) -> Result<String, String> {
    let mut out = String::with_capacity(template.len());
    let mut last = 0;
    for caps in placeholder().captures_iter(template) {
        let whole = caps.get(0).unwrap();
        let key = &caps[1];
        let value = values.get(key).ok_or_else(|| key.to_string())?;
        out.push_str(&template[last..whole.start()]);
        out.push_str(value);
        last = whole.end();
    }
    out.push_str(&template[last..]);
    Ok(out)
}
