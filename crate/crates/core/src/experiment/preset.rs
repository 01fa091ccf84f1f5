use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::features::{augmented_specs, baseline_specs};
use crate::ingest::Catalog;

pub const BASELINE_SENSORS: [&str; 4] = ["RUA^", "LUA^", "RUA_", "LUA_"];
pub const PIONEER_A_SENSORS: [&str; 9] = ["R-SHOE", "L-SHOE", "RWR", "LWR", "RUA_", "RUA^", "LUA_", "LUA^", "HIP"];
pub const PIONEER_B_SENSORS: [&str; 10] = ["R-SHOE", "L-SHOE", "RLA", "LLA", "BACK", "RUA", "LUA", "RWR", "LWR", "HIP"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetId {
    A,
    B,
    C,
    D,
    E,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorSet {
    Baseline,
    All,
    PioneerA,
    PioneerB,
}

impl PresetId {
    pub const ALL: [PresetId; 6] = [PresetId::A, PresetId::B, PresetId::C, PresetId::D, PresetId::E, PresetId::F];

    pub fn letter(self) -> &'static str {
        match self {
            PresetId::A => "a",
            PresetId::B => "b",
            PresetId::C => "c",
            PresetId::D => "d",
            PresetId::E => "e",
            PresetId::F => "f",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            PresetId::A => "Baseline",
            PresetId::B => "All sensors",
            PresetId::C => "All sensors + feature augmentation",
            PresetId::D => "Sensor pioneering A + feature augmentation",
            PresetId::E => "Sensor pioneering B",
            PresetId::F => "Sensor pioneering B + feature augmentation",
        }
    }

    pub fn sensor_set(self) -> SensorSet {
        match self {
            PresetId::A => SensorSet::Baseline,
            PresetId::B | PresetId::C => SensorSet::All,
            PresetId::D => SensorSet::PioneerA,
            PresetId::E | PresetId::F => SensorSet::PioneerB,
        }
    }

    pub fn augmented(self) -> bool {
        matches!(self, PresetId::C | PresetId::D | PresetId::F)
    }

    /// Published (accuracy %, macro-F1 %) for this preset.
    pub fn published(self) -> (f64, f64) {
        match self {
            PresetId::A => (74.3, 75.4),
            PresetId::B => (81.2, 82.9),
            PresetId::C => (83.3, 84.8),
            PresetId::D => (78.5, 80.6),
            PresetId::E => (80.5, 82.0),
            PresetId::F => (81.3, 82.8),
        }
    }

    pub fn sensors(self, catalog: &Catalog) -> Vec<String> {
        let fixed = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect();
        match self.sensor_set() {
            SensorSet::Baseline => fixed(&BASELINE_SENSORS),
            SensorSet::All => catalog.ids(),
            SensorSet::PioneerA => fixed(&PIONEER_A_SENSORS),
            SensorSet::PioneerB => fixed(&PIONEER_B_SENSORS),
        }
    }

    pub fn config(self, dataset_root: &Path, catalog: &Catalog) -> ExperimentConfig {
        let features = if self.augmented() { augmented_specs() } else { baseline_specs() };
        let mut c = ExperimentConfig::new(dataset_root, self.sensors(catalog), features);
        c.preset = Some(self.letter().into());
        c.sample_rate_hz = catalog.sample_rate_hz;
        c
    }
}

impl std::fmt::Display for PresetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.letter())
    }
}

impl std::str::FromStr for PresetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.letter().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}` (expected one of a-f)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse() {
        assert_eq!("C".parse::<PresetId>().unwrap(), PresetId::C);
        assert!("g".parse::<PresetId>().is_err());
    }

    #[test]
    fn sensor_lists_exist_in_catalog() {
        let cat = Catalog::opportunity();
        for p in PresetId::ALL {
            let c = p.config(Path::new("/d"), &cat);
            c.validate(&cat).unwrap();
        }
        assert_eq!(PresetId::B.sensors(&cat).len(), 18);
    }
}
