use glob::Pattern;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::ingest::DatasetFile;

/// Which runs go to training and which to testing, by run-name glob.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitProtocol {
    pub train_runs: Vec<String>,
    pub test_runs: Vec<String>,
}

impl Default for SplitProtocol {
    fn default() -> Self {
        Self {
            train_runs: vec!["ADL1".into(), "ADL2".into(), "ADL3".into(), "Drill".into()],
            test_runs: vec!["ADL4".into(), "ADL5".into()],
        }
    }
}

fn compile(globs: &[String]) -> Result<Vec<Pattern>, ModelError> {
    globs
        .iter()
        .map(|g| Pattern::new(g).map_err(|e| ModelError::Split(format!("bad glob `{g}`: {e}"))))
        .collect()
}

/// Split files per subject by run name. A file matching both sides is
/// training data. Files matching neither are left out.
pub fn split_train_test(
    files: &[DatasetFile],
    protocol: &SplitProtocol,
) -> Result<(Vec<DatasetFile>, Vec<DatasetFile>), ModelError> {
    let train_p = compile(&protocol.train_runs)?;
    let test_p = compile(&protocol.test_runs)?;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for f in files {
        if train_p.iter().any(|p| p.matches(&f.run)) {
            train.push(f.clone());
        } else if test_p.iter().any(|p| p.matches(&f.run)) {
            test.push(f.clone());
        }
    }
    if train.is_empty() {
        return Err(ModelError::Split("no recordings on the training side".into()));
    }
    if test.is_empty() {
        return Err(ModelError::Split("no recordings on the test side".into()));
    }
    Ok((train, test))
}
