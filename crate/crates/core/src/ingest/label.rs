use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Locomotion class of a sample or window.
///
/// The declaration order is the fixed class order used everywhere a tie has
/// to be broken or a matrix laid out: Stand, Sit, Walk, Lie, Others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityLabel {
    Stand,
    Sit,
    Walk,
    Lie,
    Others,
}

impl ActivityLabel {
    pub const ALL: [ActivityLabel; 5] = [
        ActivityLabel::Stand,
        ActivityLabel::Sit,
        ActivityLabel::Walk,
        ActivityLabel::Lie,
        ActivityLabel::Others,
    ];

    pub const COUNT: usize = 5;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivityLabel::Stand => "Stand",
            ActivityLabel::Sit => "Sit",
            ActivityLabel::Walk => "Walk",
            ActivityLabel::Lie => "Lie",
            ActivityLabel::Others => "Others",
        }
    }
}

impl fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown activity label `{s}`"))
    }
}

/// Raw Locomotion code to class table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelTable {
    entries: Vec<(i64, ActivityLabel)>,
}

impl LabelTable {
    pub fn new(entries: Vec<(i64, ActivityLabel)>) -> Self {
        Self { entries }
    }

    /// Total: the null code and any code missing from the table map to `Others`.
    pub fn map(&self, raw_code: i64) -> ActivityLabel {
        self.entries
            .iter()
            .find(|(code, _)| *code == raw_code)
            .map(|(_, label)| *label)
            .unwrap_or(ActivityLabel::Others)
    }

    /// First raw code that maps to `label`; `Others` is always written as 0.
    pub fn code_for(&self, label: ActivityLabel) -> i64 {
        if label == ActivityLabel::Others {
            return 0;
        }
        self.entries
            .iter()
            .find(|(_, l)| *l == label)
            .map(|(code, _)| *code)
            .unwrap_or(0)
    }

    pub fn entries(&self) -> &[(i64, ActivityLabel)] {
        &self.entries
    }
}
