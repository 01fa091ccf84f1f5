//! Feature registry and window featurization.
//!
//! Column names are `loc.axis.feature[.suffix]` for single-axis features
//! (`RUA^.acc_x.fft_coeffs.1`) and `loc.triad.feature[.suffix]` for features
//! that consume a whole triad (`HIP.acc.axis_corr.xy`). The schema depends
//! only on the feature specs and the channel layout.

pub mod extract;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::{ActivityLabel, Modality, Recording};
use crate::windowing::Window;

pub use extract::{
    axis_correlation, basic_stats, energy, entropy, fft_coefficients, jerk, mean_crossing_rate, peak_frequency,
    pitch_roll, sma, zero_crossing_rate, BasicStats,
};

pub const DEFAULT_ENTROPY_BINS: u32 = 16;
pub const DEFAULT_FFT_K: u32 = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("{feature}: window has {len} samples, needs at least {min}")]
    WindowTooShort {
        feature: &'static str,
        len: usize,
        min: usize,
    },
    #[error("input series differ in length")]
    LengthMismatch,
    #[error("{feature}: {message}")]
    BadParam { feature: &'static str, message: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("column `{column}`: {source}")]
    AtColumn {
        column: String,
        #[source]
        source: Box<FeatureError>,
    },
    #[error("column `{0}` is not finite")]
    NonFinite(String),
    #[error("window layout does not match the featurizer's channel layout")]
    LayoutMismatch,
}

/// Closed registry of feature ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Mean,
    Std,
    Var,
    Min,
    Max,
    Sma,
    Energy,
    Entropy,
    Zcr,
    Mcr,
    FftCoeffs,
    AxisCorr,
    PitchRoll,
    Jerk,
    PeakFreq,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 15] = [
        FeatureKind::Mean,
        FeatureKind::Std,
        FeatureKind::Var,
        FeatureKind::Min,
        FeatureKind::Max,
        FeatureKind::Sma,
        FeatureKind::Energy,
        FeatureKind::Entropy,
        FeatureKind::Zcr,
        FeatureKind::Mcr,
        FeatureKind::FftCoeffs,
        FeatureKind::AxisCorr,
        FeatureKind::PitchRoll,
        FeatureKind::Jerk,
        FeatureKind::PeakFreq,
    ];

    pub const BASELINE: [FeatureKind; 5] = [
        FeatureKind::Mean,
        FeatureKind::Std,
        FeatureKind::Var,
        FeatureKind::Min,
        FeatureKind::Max,
    ];

    /// The ten LLM-suggested features adopted on top of the baseline.
    pub const AUGMENTED: [FeatureKind; 10] = [
        FeatureKind::Sma,
        FeatureKind::Energy,
        FeatureKind::Entropy,
        FeatureKind::Zcr,
        FeatureKind::Mcr,
        FeatureKind::FftCoeffs,
        FeatureKind::AxisCorr,
        FeatureKind::PitchRoll,
        FeatureKind::Jerk,
        FeatureKind::PeakFreq,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FeatureKind::Mean => "mean",
            FeatureKind::Std => "std",
            FeatureKind::Var => "var",
            FeatureKind::Min => "min",
            FeatureKind::Max => "max",
            FeatureKind::Sma => "sma",
            FeatureKind::Energy => "energy",
            FeatureKind::Entropy => "entropy",
            FeatureKind::Zcr => "zcr",
            FeatureKind::Mcr => "mcr",
            FeatureKind::FftCoeffs => "fft_coeffs",
            FeatureKind::AxisCorr => "axis_corr",
            FeatureKind::PitchRoll => "pitch_roll",
            FeatureKind::Jerk => "jerk",
            FeatureKind::PeakFreq => "peak_freq",
        }
    }

    /// Name used when describing the feature to a person or an LLM.
    pub fn display_name(self) -> &'static str {
        match self {
            FeatureKind::Mean => "mean",
            FeatureKind::Std => "standard deviation",
            FeatureKind::Var => "variance",
            FeatureKind::Min => "min",
            FeatureKind::Max => "max",
            FeatureKind::Sma => "Signal Magnitude Area (SMA)",
            FeatureKind::Energy => "Energy",
            FeatureKind::Entropy => "Entropy",
            FeatureKind::Zcr => "Zero Crossing Rate",
            FeatureKind::Mcr => "Mean Crossing Rate",
            FeatureKind::FftCoeffs => "Fast Fourier Transform (FFT) Coefficients",
            FeatureKind::AxisCorr => "Correlation between axes",
            FeatureKind::PitchRoll => "Pitch and Roll",
            FeatureKind::Jerk => "Jerk",
            FeatureKind::PeakFreq => "Peak Frequency",
        }
    }

    /// Lowercase phrases that identify the feature in free text.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            FeatureKind::Mean => &["mean", "average", "arithmetic mean"],
            FeatureKind::Std => &["standard deviation", "std", "std dev", "stdev"],
            FeatureKind::Var => &["variance", "var"],
            FeatureKind::Min => &["min", "minimum"],
            FeatureKind::Max => &["max", "maximum"],
            FeatureKind::Sma => &["signal magnitude area", "sma"],
            FeatureKind::Energy => &["energy", "signal energy"],
            FeatureKind::Entropy => &["entropy", "signal entropy"],
            FeatureKind::Zcr => &["zero crossing rate", "zero crossings", "zcr"],
            FeatureKind::Mcr => &["mean crossing rate", "mean crossings", "mcr"],
            FeatureKind::FftCoeffs => &[
                "fast fourier transform",
                "fft coefficients",
                "fourier coefficients",
                "fft",
            ],
            FeatureKind::AxisCorr => &[
                "correlation between axes",
                "axis correlation",
                "inter axis correlation",
                "cross axis correlation",
                "correlation",
            ],
            FeatureKind::PitchRoll => &["pitch and roll", "roll and pitch", "pitch", "roll", "tilt angles"],
            FeatureKind::Jerk => &["jerk"],
            FeatureKind::PeakFreq => &["peak frequency", "dominant frequency"],
        }
    }

    /// Whether the feature consumes a full x/y/z triad rather than one axis.
    pub fn is_triad(self) -> bool {
        matches!(self, FeatureKind::Sma | FeatureKind::AxisCorr | FeatureKind::PitchRoll)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FeatureKind {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| FeatureError::UnknownFeature(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: FeatureKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, u32>,
}

impl FeatureSpec {
    /// Spec with the documented default parameters.
    pub fn new(name: FeatureKind) -> Self {
        let mut params = BTreeMap::new();
        match name {
            FeatureKind::Entropy => {
                params.insert("bins".to_string(), DEFAULT_ENTROPY_BINS);
            }
            FeatureKind::FftCoeffs => {
                params.insert("k".to_string(), DEFAULT_FFT_K);
            }
            _ => {}
        }
        Self { name, params }
    }

    pub fn with_param(mut self, key: &str, value: u32) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        let allowed: &[&str] = match self.name {
            FeatureKind::Entropy => &["bins"],
            FeatureKind::FftCoeffs => &["k"],
            _ => &[],
        };
        let feature = self.name.id();
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(FeatureError::BadParam {
                feature,
                message: format!("unknown parameter `{k}`"),
            });
        }
        if self.name == FeatureKind::Entropy && self.bins() < 2 {
            return Err(FeatureError::BadParam {
                feature,
                message: "bins must be at least 2".into(),
            });
        }
        if self.name == FeatureKind::FftCoeffs && self.k() < 1 {
            return Err(FeatureError::BadParam {
                feature,
                message: "k must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.params.get("bins").copied().unwrap_or(DEFAULT_ENTROPY_BINS) as usize
    }

    pub fn k(&self) -> usize {
        self.params.get("k").copied().unwrap_or(DEFAULT_FFT_K) as usize
    }

    /// Column suffixes produced per axis (or per triad).
    fn suffixes(&self) -> Vec<String> {
        match self.name {
            FeatureKind::FftCoeffs => (1..=self.k()).map(|i| i.to_string()).collect(),
            FeatureKind::AxisCorr => vec!["xy".into(), "xz".into(), "yz".into()],
            FeatureKind::PitchRoll => vec!["pitch".into(), "roll".into()],
            _ => vec![String::new()],
        }
    }
}

pub fn baseline_specs() -> Vec<FeatureSpec> {
    FeatureKind::BASELINE.into_iter().map(FeatureSpec::new).collect()
}

pub fn augmented_specs() -> Vec<FeatureSpec> {
    FeatureKind::BASELINE
        .into_iter()
        .chain(FeatureKind::AUGMENTED)
        .map(FeatureSpec::new)
        .collect()
}

/// Shape of the channels a featurizer expects: location id, then triads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelLayout {
    pub locations: Vec<(String, Vec<(String, Modality)>)>,
}

impl ChannelLayout {
    pub fn of(rec: &Recording) -> Self {
        Self {
            locations: rec
                .locations
                .iter()
                .map(|l| (l.id.clone(), l.triads.iter().map(|t| (t.name.clone(), t.modality)).collect()))
                .collect(),
        }
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Computes feature vectors with a fixed schema.
#[derive(Debug, Clone)]
pub struct Featurizer {
    specs: Vec<FeatureSpec>,
    layout: ChannelLayout,
    columns: Vec<String>,
}

impl Featurizer {
    pub fn new(specs: &[FeatureSpec], layout: ChannelLayout) -> Result<Self, FeatureError> {
        for s in specs {
            s.validate()?;
        }
        let mut columns = Vec::new();
        for (loc, triads) in &layout.locations {
            for (triad, modality) in triads {
                for spec in specs {
                    if spec.name == FeatureKind::PitchRoll && *modality != Modality::Acc {
                        continue;
                    }
                    let suffixes = spec.suffixes();
                    let prefixes: Vec<String> = if spec.name.is_triad() {
                        vec![format!("{loc}.{triad}.{}", spec.name)]
                    } else {
                        AXES.iter().map(|a| format!("{loc}.{triad}_{a}.{}", spec.name)).collect()
                    };
                    for p in &prefixes {
                        for s in &suffixes {
                            columns.push(if s.is_empty() { p.clone() } else { format!("{p}.{s}") });
                        }
                    }
                }
            }
        }
        Ok(Self {
            specs: specs.to_vec(),
            layout,
            columns,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.specs
    }

    /// Feature values for one window, in schema order.
    pub fn featurize(&self, w: &Window<'_>) -> Result<Vec<f64>, FeatureError> {
        if ChannelLayout::of(w.recording) != self.layout {
            return Err(FeatureError::LayoutMismatch);
        }
        let fs = w.recording.sample_rate_hz;
        let mut out = Vec::with_capacity(self.columns.len());
        for loc in &w.recording.locations {
            for triad in &loc.triads {
                let axes = [w.axis(triad, 0), w.axis(triad, 1), w.axis(triad, 2)];
                for spec in &self.specs {
                    let start = out.len();
                    self.apply(spec, triad.modality, &axes, fs, &mut out)
                        .map_err(|e| FeatureError::AtColumn {
                            column: self.columns.get(start).cloned().unwrap_or_default(),
                            source: Box::new(e),
                        })?;
                }
            }
        }
        debug_assert_eq!(out.len(), self.columns.len());
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite(self.columns[i].clone()));
        }
        Ok(out)
    }

    fn apply(
        &self,
        spec: &FeatureSpec,
        modality: Modality,
        axes: &[&[f64]; 3],
        fs: f64,
        out: &mut Vec<f64>,
    ) -> Result<(), FeatureError> {
        match spec.name {
            FeatureKind::Sma => out.push(sma(axes[0], axes[1], axes[2])?),
            FeatureKind::AxisCorr => {
                out.push(axis_correlation(axes[0], axes[1])?);
                out.push(axis_correlation(axes[0], axes[2])?);
                out.push(axis_correlation(axes[1], axes[2])?);
            }
            FeatureKind::PitchRoll => {
                if modality == Modality::Acc {
                    let (p, r) = pitch_roll(axes[0], axes[1], axes[2])?;
                    out.push(p);
                    out.push(r);
                }
            }
            _ => {
                for x in axes {
                    match spec.name {
                        FeatureKind::Mean => out.push(basic_stats(x)?.mean),
                        FeatureKind::Std => out.push(basic_stats(x)?.std),
                        FeatureKind::Var => out.push(basic_stats(x)?.var),
                        FeatureKind::Min => out.push(basic_stats(x)?.min),
                        FeatureKind::Max => out.push(basic_stats(x)?.max),
                        FeatureKind::Energy => out.push(energy(x)?),
                        FeatureKind::Entropy => out.push(entropy(x, spec.bins())?),
                        FeatureKind::Zcr => out.push(zero_crossing_rate(x)?),
                        FeatureKind::Mcr => out.push(mean_crossing_rate(x)?),
                        FeatureKind::FftCoeffs => out.extend(fft_coefficients(x, spec.k())?),
                        FeatureKind::Jerk => out.push(jerk(x, fs)?),
                        FeatureKind::PeakFreq => out.push(peak_frequency(x, fs)?),
                        FeatureKind::Sma | FeatureKind::AxisCorr | FeatureKind::PitchRoll => unreachable!(),
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ordered (column, value) pairs for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub columns: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        self.columns.iter().position(|c| c == column).map(|i| self.values[i])
    }
}

pub fn featurize_window(w: &Window<'_>, specs: &[FeatureSpec]) -> Result<FeatureVector, FeatureError> {
    let f = Featurizer::new(specs, ChannelLayout::of(w.recording))?;
    let values = f.featurize(w)?;
    Ok(FeatureVector {
        columns: f.columns,
        values,
    })
}

/// Row-major feature table with one label per row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<ActivityLabel>,
    /// Subject of each row.
    pub groups: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Default::default()
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn push(&mut self, row: Vec<f64>, label: ActivityLabel, group: &str) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.labels.push(label);
        self.groups.push(group.to_string());
    }

    pub fn extend(&mut self, other: FeatureMatrix) {
        debug_assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
        self.labels.extend(other.labels);
        self.groups.extend(other.groups);
    }

    /// CSV with the schema as header plus a trailing `label` column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<&str> = self.columns.iter().map(String::as_str).chain(["label"]).collect();
        writeln!(w, "{}", header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","))?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                write!(w, "{v},")?;
            }
            writeln!(w, "{label}")?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
