mod common;

use std::path::Path;

use common::*;
use har_pioneer::experiment::*;
use har_pioneer::features::{augmented_specs, baseline_specs, FeatureKind};
use har_pioneer::ingest::{load_recording, Catalog, LoadOptions};
use har_pioneer::pioneer::{parse_feature_suggestions, parse_sensor_suggestions};
use har_pioneer::store::ResultsStore;

#[test]
fn preset_table() {
    let cat = Catalog::opportunity();
    let ids = |p: PresetId| p.config(Path::new("/d"), &cat).sensors;
    let feats = |p: PresetId| p.config(Path::new("/d"), &cat).features;
    assert_eq!(ids(PresetId::A), ["RUA^", "LUA^", "RUA_", "LUA_"]);
    assert_eq!(ids(PresetId::B), cat.ids());
    assert_eq!(ids(PresetId::B).len(), 18);
    assert_eq!(ids(PresetId::C), cat.ids());
    assert_eq!(ids(PresetId::D), ["R-SHOE", "L-SHOE", "RWR", "LWR", "RUA_", "RUA^", "LUA_", "LUA^", "HIP"]);
    assert_eq!(ids(PresetId::E), ["R-SHOE", "L-SHOE", "RLA", "LLA", "BACK", "RUA", "LUA", "RWR", "LWR", "HIP"]);
    assert_eq!(ids(PresetId::F), ids(PresetId::E));
    for p in [PresetId::A, PresetId::B, PresetId::E] {
        assert_eq!(feats(p), baseline_specs());
    }
    for p in [PresetId::C, PresetId::D, PresetId::F] {
        assert_eq!(feats(p), augmented_specs());
        assert_eq!(feats(p).len(), 15);
    }
    let published: Vec<(f64, f64)> = PresetId::ALL.iter().map(|p| p.published()).collect();
    assert_eq!(
        published,
        [(74.3, 75.4), (81.2, 82.9), (83.3, 84.8), (78.5, 80.6), (80.5, 82.0), (81.3, 82.8)]
    );
}

#[test]
fn synthetic_preset_a_end_to_end() {
    let data = tempfile::tempdir().unwrap();
    synth_baseline(data.path(), 5);
    let config = PresetId::A.config(data.path(), &Catalog::opportunity());
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    let (r1, p1) = run_and_store(&config, &ResultsStore::new(out1.path())).unwrap();
    let (_, p2) = run_and_store(&config, &ResultsStore::new(out2.path())).unwrap();
    assert!(r1.pooled.accuracy >= 0.95, "{}", r1.pooled.headline());
    assert!(r1.pooled.macro_f1 >= 0.95, "{}", r1.pooled.headline());
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(p1.file_name().unwrap().to_str().unwrap(), format!("{}.json", config.fingerprint()));
    assert_eq!(r1.per_subject.len(), 2);
    assert_eq!(r1.test_files, ["S1-ADL4", "S1-ADL5", "S2-ADL4", "S2-ADL5"]);
    assert_eq!(r1.pooled.config_fingerprint.as_deref(), Some(config.fingerprint().as_str()));
    let index = ResultsStore::new(out1.path()).index().unwrap();
    assert_eq!(index[&config.fingerprint()].preset.as_deref(), Some("a"));
    let stored = ExperimentConfig::load(&out1.path().join(format!("{}.config.toml", config.fingerprint()))).unwrap();
    assert_eq!(stored, config);
    assert!(r1.render_table().contains("Stand"));
}

#[test]
fn drop_others_and_subject_filter() {
    let data = tempfile::tempdir().unwrap();
    synth_baseline(data.path(), 6);
    let mut config = PresetId::A.config(data.path(), &Catalog::opportunity());
    config.subjects = vec!["S2".into()];
    config.drop_others = true;
    config.classifier.n_trees = 10;
    let r = run(&config).unwrap();
    assert_eq!(r.per_subject.keys().collect::<Vec<_>>(), ["S2"]);
    assert_eq!(r.pooled.support()[4], 0);
}

#[test]
fn run_errors() {
    let config = PresetId::A.config(Path::new("/nonexistent/dataset"), &Catalog::opportunity());
    assert!(matches!(run(&config), Err(ExperimentError::Dataset(_))));
    let empty = tempfile::tempdir().unwrap();
    let config = PresetId::A.config(empty.path(), &Catalog::opportunity());
    assert!(matches!(run(&config), Err(ExperimentError::Dataset(_))));
    let mut bad = config.clone();
    bad.sensors.push("TAIL".into());
    assert!(matches!(run(&bad), Err(ExperimentError::Config(_))));
}

#[test]
fn apply_fixture_suggestions() {
    let cat = Catalog::opportunity();
    let base = PresetId::A.config(Path::new("/d"), &cat);
    let b = parse_sensor_suggestions(&read_fixture("replies/sensors_B.txt"), &cat);

    let replaced = apply_suggestions(&base, &b, ApplyMode::Replace).unwrap();
    assert_eq!(replaced.sensors, PIONEER_B_SENSORS);

    let union = apply_suggestions(&base, &b, ApplyMode::Union).unwrap();
    for id in PIONEER_B_SENSORS.iter().chain(&BASELINE_SENSORS) {
        assert!(union.sensors.iter().any(|s| s == id));
    }
    assert_eq!(union.sensors.len(), 14);
    assert_eq!(apply_suggestions(&union, &b, ApplyMode::Union).unwrap(), union);

    let f = parse_feature_suggestions(&read_fixture("replies/features.txt"));
    let with_features = apply_suggestions(&base, &f, ApplyMode::Union).unwrap();
    assert_eq!(with_features.features.len(), 15);
    let mut kinds: Vec<FeatureKind> = with_features.features.iter().map(|s| s.name).collect();
    kinds.sort();
    let mut all = FeatureKind::ALL.to_vec();
    all.sort();
    assert_eq!(kinds, all);
    assert_eq!(with_features.sensors, base.sensors);
    assert_eq!(base.features.len(), 5);
}

#[test]
fn synth_files() {
    let cat = Catalog::opportunity();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let opts = SynthOptions { n_subjects: 1, duration_s: 60.0, ..SynthOptions::default() };
    let fa = synthesize_dataset(a.path(), &cat, &opts).unwrap();
    let fb = synthesize_dataset(b.path(), &cat, &opts).unwrap();
    assert_eq!(fa.len(), 6);
    let catalog_cols: Vec<usize> = cat.locations().iter().flat_map(|l| l.channel_columns()).collect();
    let (mut nan, mut cells) = (0usize, 0usize);
    for (x, y) in fa.iter().zip(&fb) {
        let text = std::fs::read_to_string(x).unwrap();
        assert_eq!(text, std::fs::read_to_string(y).unwrap());
        assert_eq!(text.lines().count(), 1800);
        for line in text.lines() {
            let cols: Vec<&str> = line.split(' ').collect();
            for &c in &catalog_cols {
                cells += 1;
                nan += (cols[c - 1] == "NaN") as usize;
            }
        }
    }
    let rate = nan as f64 / cells as f64;
    assert!((rate - 0.01).abs() <= 0.005, "missing fraction {rate}");

    let rec = load_recording(&fa[0], &cat.ids(), &cat, &LoadOptions::default()).unwrap();
    assert_eq!(rec.len(), 1800);
    assert!(rec.locations.iter().all(|l| l.triads.iter().all(|t| t.axes.iter().all(|a| a.iter().all(|v| v.is_finite())))));

    assert!(synthesize_dataset(Path::new("/proc/no/such/dir"), &cat, &opts).is_err());
}

#[test]
fn reproduction_comparison_uses_published_numbers() {
    let measured: Vec<_> = PresetId::ALL.iter().map(|&p| (p, 0.5, 0.5)).collect();
    let r = compare(&measured);
    assert_eq!(r.rows.len(), 6);
    assert!(r.rows.iter().all(|row| row.flagged));
    assert_eq!(r.claims.len(), 3);
    assert!(!r.claims[0].holds);
    assert!(r.claims[1].holds && r.claims[2].holds);
}
