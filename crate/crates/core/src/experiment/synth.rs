//! Synthetic OPPORTUNITY-format recordings with class-separable signals.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::ingest::{ActivityLabel, Catalog, Modality};

pub const SYNTH_RUNS: [&str; 6] = ["ADL1", "ADL2", "ADL3", "ADL4", "ADL5", "Drill"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub seed: u64,
    pub n_subjects: usize,
    pub duration_s: f64,
    /// Probability that a sensor cell is written as NaN.
    pub nan_rate: f64,
    /// Locations that carry signal; the rest of the sensor columns are zero.
    /// All catalog locations when `None`.
    pub locations: Option<Vec<String>>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            seed: super::DEFAULT_SEED,
            n_subjects: 2,
            duration_s: 600.0,
            nan_rate: 0.01,
            locations: None,
        }
    }
}

/// Signal regime for one class.
struct Regime {
    /// Unit gravity direction in the sensor frame.
    gravity: [f64; 3],
    freq_hz: f64,
    /// Oscillation amplitude of the accelerometer, milli-g.
    amp: f64,
    gyro_amp: f64,
    mag: [f64; 3],
}

fn regime(label: ActivityLabel) -> Regime {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match label {
        ActivityLabel::Stand => Regime { gravity: [0.0, 0.0, 1.0], freq_hz: 0.3, amp: 15.0, gyro_amp: 5.0, mag: [300.0, 0.0, -400.0] },
        ActivityLabel::Sit => Regime { gravity: [s, 0.0, s], freq_hz: 0.2, amp: 10.0, gyro_amp: 3.0, mag: [0.0, 300.0, -400.0] },
        ActivityLabel::Walk => Regime { gravity: [0.0, 0.0, 1.0], freq_hz: 1.9, amp: 350.0, gyro_amp: 120.0, mag: [300.0, 0.0, -400.0] },
        ActivityLabel::Lie => Regime { gravity: [1.0, 0.0, 0.0], freq_hz: 0.1, amp: 5.0, gyro_amp: 2.0, mag: [-400.0, 0.0, 300.0] },
        ActivityLabel::Others => Regime { gravity: [0.0, s, s], freq_hz: 0.7, amp: 120.0, gyro_amp: 40.0, mag: [0.0, -300.0, -400.0] },
    }
}

/// Per-sample labels in segments of 40 to 80 s; each round visits every
/// class once in shuffled order.
fn label_plan(n: usize, fs: f64, rng: &mut ChaCha8Rng) -> Vec<ActivityLabel> {
    let mut out = Vec::with_capacity(n);
    let mut order = ActivityLabel::ALL.to_vec();
    let mut prev: Option<ActivityLabel> = None;
    while out.len() < n {
        order.shuffle(rng);
        if Some(order[0]) == prev {
            order.swap(0, 4);
        }
        for &l in &order {
            let len = (rng.gen_range(40.0..=80.0) * fs).round() as usize;
            out.extend(std::iter::repeat_n(l, len));
            prev = Some(l);
        }
    }
    out.truncate(n);
    out
}

/// What one file column holds.
#[derive(Clone, Copy)]
enum ColumnRole {
    Unused,
    Sensor { loc: usize, modality: Modality, axis: usize, live: bool },
}

fn column_roles(catalog: &Catalog, live: &[String]) -> Vec<ColumnRole> {
    let mut roles = vec![ColumnRole::Unused; catalog.n_columns];
    for (li, loc) in catalog.locations().iter().enumerate() {
        let is_live = live.contains(&loc.id);
        for t in &loc.triads {
            for (axis, &c) in t.columns.iter().enumerate() {
                roles[c - 1] = ColumnRole::Sensor { loc: li, modality: t.modality, axis, live: is_live };
            }
        }
    }
    roles
}

fn render_file(
    catalog: &Catalog,
    roles: &[ColumnRole],
    opts: &SynthOptions,
    subject: usize,
    run: usize,
) -> String {
    let fs = catalog.sample_rate_hz;
    let n = (opts.duration_s * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream((subject * SYNTH_RUNS.len() + run) as u64);
    let labels = label_plan(n, fs, &mut rng);
    let noise = Normal::new(0.0, 8.0).expect("valid normal");
    // Per-location gain and phase so locations are not identical copies.
    let n_loc = catalog.locations().len();
    let gains: Vec<f64> = (0..n_loc).map(|_| rng.gen_range(0.8..1.2)).collect();
    let phases: Vec<f64> = (0..n_loc).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let tau = std::f64::consts::TAU;

    let mut out = String::with_capacity(n * (roles.len() * 3 + 16));
    for (i, &label) in labels.iter().enumerate() {
        let t = i as f64 / fs;
        let r = regime(label);
        write!(out, "{}", (t * 1000.0).round() as i64).unwrap();
        for (c, role) in roles.iter().enumerate().skip(1) {
            out.push(' ');
            if c + 1 == catalog.label_column {
                write!(out, "{}", catalog.labels().code_for(label)).unwrap();
                continue;
            }
            let ColumnRole::Sensor { loc, modality, axis, live } = *role else {
                out.push('0');
                continue;
            };
            if opts.nan_rate > 0.0 && rng.gen_bool(opts.nan_rate) {
                out.push_str("NaN");
                continue;
            }
            if !live {
                out.push('0');
                continue;
            }
            let phase = phases[loc] + axis as f64 * 1.3;
            let wave = (tau * r.freq_hz * t + phase).sin();
            let v = match modality {
                Modality::Acc => 1000.0 * r.gravity[axis] + gains[loc] * r.amp * wave,
                Modality::Gyro => gains[loc] * r.gyro_amp * wave,
                Modality::Mag => r.mag[axis] + 0.1 * gains[loc] * r.amp * wave,
            } + noise.sample(&mut rng);
            write!(out, "{v:.1}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Write `S<n>-<run>.dat` files under `out`. Identical options give
/// byte-identical files.
pub fn synthesize_dataset(out: &Path, catalog: &Catalog, opts: &SynthOptions) -> Result<Vec<PathBuf>, ExperimentError> {
    if opts.n_subjects == 0 {
        return Err(ExperimentError::Config("n_subjects must be at least 1".into()));
    }
    if opts.duration_s.is_nan() || opts.duration_s <= 0.0 {
        return Err(ExperimentError::Config("duration must be positive".into()));
    }
    if !(0.0..1.0).contains(&opts.nan_rate) {
        return Err(ExperimentError::Config("nan_rate must be in [0, 1)".into()));
    }
    let live = match &opts.locations {
        None => catalog.ids(),
        Some(ids) => {
            for id in ids {
                if catalog.get(id).is_none() {
                    return Err(ExperimentError::Config(format!("unknown sensor location `{id}`")));
                }
            }
            ids.clone()
        }
    };
    std::fs::create_dir_all(out).map_err(|e| ExperimentError::Io(format!("{}: {e}", out.display())))?;
    let roles = column_roles(catalog, &live);
    let jobs: Vec<(usize, usize)> = (0..opts.n_subjects)
        .flat_map(|s| (0..SYNTH_RUNS.len()).map(move |r| (s, r)))
        .collect();
    jobs.par_iter()
        .map(|&(s, r)| {
            let path = out.join(format!("S{}-{}.dat", s + 1, SYNTH_RUNS[r]));
            let text = render_file(catalog, &roles, opts, s, r);
            crate::store::write_atomic(&path, text.as_bytes())
                .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
