#![allow(dead_code)]

pub mod exactness;
pub mod oracles;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use har_pioneer::experiment::PresetId;
use har_pioneer::features::{augmented_specs, baseline_specs};
use har_pioneer::ingest::Catalog;
use har_pioneer::llm::{request_fingerprint, Cassette, CassetteEntry, ChatSession, Role};
use har_pioneer::model::EvaluationReport;
use har_pioneer::pioneer::{render_feature_prompt, render_sensor_prompt, PromptContext, TemplateSet, Variant};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn baseline_report() -> EvaluationReport {
    serde_json::from_str(&read_fixture("baseline_report.json")).unwrap()
}

/// Prompt context of preset a, optionally with the baseline evaluation.
pub fn baseline_ctx(with_eval: bool) -> PromptContext {
    let cat = Catalog::opportunity();
    let config = PresetId::A.config(Path::new("."), &cat);
    let eval = with_eval.then(baseline_report);
    PromptContext::new(&cat, &config.sensors, &config.features, eval).unwrap()
}

pub fn augmented_ctx() -> PromptContext {
    let cat = Catalog::opportunity();
    let config = PresetId::A.config(Path::new("."), &cat);
    PromptContext::new(&cat, &config.sensors, &augmented_specs(), None).unwrap()
}

pub fn baseline_feature_count() -> usize {
    baseline_specs().len()
}

/// The prompts the CLI sends, keyed by golden file name.
pub fn rendered_prompts() -> BTreeMap<&'static str, String> {
    let t = TemplateSet::default();
    BTreeMap::from([
        ("prompt_A.txt", render_sensor_prompt(&t, &baseline_ctx(false), Variant::A).unwrap()),
        ("prompt_B.txt", render_sensor_prompt(&t, &baseline_ctx(true), Variant::B).unwrap()),
        ("prompt_feat.txt", render_feature_prompt(&t, &baseline_ctx(false)).unwrap()),
    ])
}

fn entry(reply: &str, prompt: &str) -> CassetteEntry {
    CassetteEntry {
        reply: reply.to_string(),
        model: "gpt-4".into(),
        recorded_at: 0,
        request_summary: prompt.chars().take(120).collect(),
    }
}

/// Rebuild the fixture cassette from the golden prompts and fixture replies:
/// the two sensor prompts each in a fresh chat, and the feature prompt
/// following the variant-A exchange.
pub fn build_cassette(dir: &Path) {
    let prompts = rendered_prompts();
    let a = read_fixture("replies/sensors_A.txt");
    let b = read_fixture("replies/sensors_B.txt");
    let f = read_fixture("replies/features.txt");
    let c = Cassette::open(dir).unwrap();
    for (prompt, reply) in [(&prompts["prompt_A.txt"], &a), (&prompts["prompt_B.txt"], &b)] {
        let s = ChatSession::new("gpt-4", 0.0, None);
        c.insert(&request_fingerprint("gpt-4", &s.with_user(prompt), 0.0), entry(reply, prompt))
            .unwrap();
    }
    let mut s = ChatSession::new("gpt-4", 0.0, None);
    s.push(Role::User, &prompts["prompt_A.txt"]).unwrap();
    s.push(Role::Assistant, &a).unwrap();
    let feat = &prompts["prompt_feat.txt"];
    c.insert(&request_fingerprint("gpt-4", &s.with_user(feat), 0.0), entry(&f, feat))
        .unwrap();
}

pub fn update_golden() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

/// Synthetic dataset with signal at the preset-a locations only.
pub fn synth_baseline(dir: &Path, seed: u64) -> Vec<PathBuf> {
    use har_pioneer::experiment::{synthesize_dataset, SynthOptions, BASELINE_SENSORS};
    let opts = SynthOptions {
        seed,
        locations: Some(BASELINE_SENSORS.iter().map(|s| s.to_string()).collect()),
        ..SynthOptions::default()
    };
    synthesize_dataset(dir, &Catalog::opportunity(), &opts).unwrap()
}

pub fn bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_har-pioneer"))
}
