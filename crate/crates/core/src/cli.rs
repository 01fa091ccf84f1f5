//! Command-line front end. Exit codes: 0 success, 1 failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::experiment::{
    apply_suggestions, compare, run_and_store, synthesize_dataset, ApplyMode, ExperimentConfig, ExperimentReport,
    PresetId, SynthOptions, DEFAULT_SEED,
};
use crate::ingest::Catalog;
use crate::llm::{LlmClient, LlmConfig, Mode};
use crate::model::EvaluationReport;
use crate::pioneer::{
    parse_feature_suggestions, parse_sensor_suggestions, render_feature_prompt, render_sensor_prompt, PromptContext,
    SuggestionSet, TemplateSet, Variant,
};
use crate::store::{write_atomic, ResultsStore};

#[derive(Debug, Parser)]
#[command(name = "har-pioneer", version, about = "Sensor and feature pioneering for activity recognition")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Sensors,
    Features,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and store its report.
    Run(RunArgs),
    /// Ask the chat model for sensor or feature suggestions.
    Pioneer(PioneerArgs),
    /// Derive a new config from a reviewed suggestions file.
    Apply(ApplyArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
    /// Print a stored report, or the index of a results directory.
    Report(ReportArgs),
    /// Write the config of a preset.
    Preset(PresetArgs),
    /// Run all six presets and compare with the published numbers.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<PresetId>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset root; overrides the config's.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PioneerArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value = "A")]
    variant: Variant,
    /// Report of the current model; required for variant B.
    #[arg(long)]
    from_report: Option<PathBuf>,
    /// Current experiment config; preset a when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "replay")]
    mode: Mode,
    #[arg(long, default_value = "cassettes")]
    cassette_dir: PathBuf,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    timeout_s: Option<u64>,
    /// Directory with template overrides.
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long, default_value = "pioneer")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    suggestions: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use exactly the suggested items instead of adding them.
    #[arg(long)]
    replace: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 600.0)]
    duration_s: f64,
    #[arg(long, default_value_t = 2)]
    subjects: usize,
    #[arg(long, default_value_t = 0.01)]
    nan_rate: f64,
    /// Comma-separated locations that carry signal; all when absent.
    #[arg(long, value_delimiter = ',')]
    locations: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Report file or results directory.
    path: PathBuf,
}

#[derive(Debug, Args)]
struct PresetArgs {
    preset: PresetId,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn fail(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn usage(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

type CliResult = Result<(String, serde_json::Value), CliError>;

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Pioneer(a) => cmd_pioneer(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report(a) => cmd_report(a),
        Command::Preset(a) => cmd_preset(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match (result, cli.format) {
        (Ok((text, _)), Format::Text) => {
            let _ = write!(out, "{text}");
            0
        }
        (Ok((_, value)), Format::Json) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"));
            0
        }
        (Err(e), format) => {
            if format == Format::Json {
                let _ = writeln!(out, "{}", json!({ "error": e.message, "code": e.code }));
            }
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::load(path).map_err(CliError::fail)
}

fn cmd_run(a: &RunArgs) -> CliResult {
    let mut config = match (&a.preset, &a.config) {
        (Some(p), _) => {
            let data = a.data.clone().ok_or_else(|| CliError::usage("--preset needs --data"))?;
            p.config(&data, &Catalog::opportunity())
        }
        (None, Some(path)) => load_config(path)?,
        (None, None) => return Err(CliError::usage("either --preset or --config is required")),
    };
    if let Some(d) = &a.data {
        config.dataset_root = d.clone();
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if !config.dataset_root.is_dir() {
        return Err(CliError::fail(format!(
            "dataset: {} is not a directory",
            config.dataset_root.display()
        )));
    }
    let store = ResultsStore::new(&a.out);
    let (report, path) = run_and_store(&config, &store).map_err(CliError::fail)?;
    let text = format!(
        "{}\nreport written to {}\n",
        report.pooled.headline(),
        path.display()
    );
    let value = json!({
        "report_path": path,
        "config_fingerprint": report.config_fingerprint,
        "preset": report.preset,
        "accuracy": report.pooled.accuracy,
        "macro_f1": report.pooled.macro_f1,
        "headline": report.pooled.headline(),
    });
    Ok((text, value))
}

/// Read either an experiment report or a bare evaluation report.
fn load_evaluation(path: &Path) -> Result<EvaluationReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::fail(format!("{}: {e}", path.display())))?;
    if let Ok(r) = ExperimentReport::from_json(&text) {
        return Ok(r.pooled);
    }
    serde_json::from_str(&text).map_err(|e| CliError::fail(format!("{}: not a report: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::fail(format!("{}: {e}", path.display())))
}

fn summary_json(s: &SuggestionSet, path: &Path) -> serde_json::Value {
    json!({
        "kind": s.kind,
        "resolved": s.resolved,
        "unresolved": s.unresolved,
        "fingerprint": s.fingerprint(),
        "suggestions_path": path,
    })
}

fn cmd_pioneer(a: &PioneerArgs) -> CliResult {
    if a.variant == Variant::B && a.from_report.is_none() {
        return Err(CliError::usage("variant B needs --from-report"));
    }
    let config = match &a.config {
        Some(p) => load_config(p)?,
        None => PresetId::A.config(Path::new("."), &Catalog::opportunity()),
    };
    let catalog = config.load_catalog().map_err(CliError::fail)?;
    let evaluation = a.from_report.as_deref().map(load_evaluation).transpose()?;
    let ctx = PromptContext::new(&catalog, &config.sensors, &config.features, evaluation)
        .map_err(CliError::fail)?
        .with_window(config.window_s, config.overlap_frac, config.sample_rate_hz);
    let templates = match &a.templates {
        Some(d) => TemplateSet::load_dir(d).map_err(CliError::fail)?,
        None => TemplateSet::default(),
    };

    let mut llm = LlmConfig {
        mode: a.mode,
        cassette_dir: Some(a.cassette_dir.clone()),
        ..LlmConfig::default()
    };
    if let Some(u) = &a.base_url {
        llm.base_url = u.clone();
    }
    if let Some(m) = &a.model {
        llm.model = m.clone();
    }
    if let Some(t) = a.timeout_s {
        llm.timeout_s = t;
    }
    let client = LlmClient::new(llm).map_err(CliError::fail)?;
    let mut session = client.new_session(None);

    // The feature prompt follows the sensor prompt in the same chat.
    let sensor_prompt = render_sensor_prompt(&templates, &ctx, a.variant).map_err(CliError::fail)?;
    let sensor_reply = client.complete(&mut session, &sensor_prompt).map_err(CliError::fail)?;
    write_file(&a.out.join("sensors_prompt.txt"), &sensor_prompt)?;
    write_file(&a.out.join("sensors_reply.txt"), &sensor_reply)?;
    let (set, stem) = match a.kind {
        Kind::Sensors => (
            parse_sensor_suggestions(&sensor_reply, &catalog).with_prompt(&sensor_prompt),
            "sensors",
        ),
        Kind::Features => {
            let prompt = render_feature_prompt(&templates, &ctx).map_err(CliError::fail)?;
            let reply = client.complete(&mut session, &prompt).map_err(CliError::fail)?;
            write_file(&a.out.join("features_prompt.txt"), &prompt)?;
            write_file(&a.out.join("features_reply.txt"), &reply)?;
            (parse_feature_suggestions(&reply).with_prompt(&prompt), "features")
        }
    };
    let path = a.out.join(format!("{stem}_suggestions.json"));
    let body = serde_json::to_string_pretty(&set).expect("suggestions serialize");
    write_file(&path, &format!("{body}\n"))?;
    let mut text = format!("resolved ({}): {}\n", set.resolved.len(), set.resolved.join(", "));
    text.push_str(&format!("unresolved ({}): {}\n", set.unresolved.len(), set.unresolved.join("; ")));
    text.push_str(&format!("suggestions written to {}\n", path.display()));
    Ok((text, summary_json(&set, &path)))
}

fn cmd_apply(a: &ApplyArgs) -> CliResult {
    let config = load_config(&a.config)?;
    let text = std::fs::read_to_string(&a.suggestions)
        .map_err(|e| CliError::fail(format!("{}: {e}", a.suggestions.display())))?;
    let set: SuggestionSet = serde_json::from_str(&text)
        .map_err(|e| CliError::fail(format!("{}: not a suggestions file: {e}", a.suggestions.display())))?;
    let mode = if a.replace { ApplyMode::Replace } else { ApplyMode::Union };
    let next = apply_suggestions(&config, &set, mode).map_err(CliError::fail)?;
    next.save(&a.out).map_err(CliError::fail)?;
    let text = format!(
        "{} sensors, {} features\nconfig written to {}\n",
        next.sensors.len(),
        next.features.len(),
        a.out.display()
    );
    let value = json!({
        "config_path": a.out,
        "sensors": next.sensors,
        "features": next.features.iter().map(|f| f.name.id()).collect::<Vec<_>>(),
        "config_fingerprint": next.fingerprint(),
    });
    Ok((text, value))
}

fn cmd_synth(a: &SynthArgs) -> CliResult {
    let opts = SynthOptions {
        seed: a.seed,
        n_subjects: a.subjects,
        duration_s: a.duration_s,
        nan_rate: a.nan_rate,
        locations: a.locations.clone(),
    };
    let files = synthesize_dataset(&a.out, &Catalog::opportunity(), &opts).map_err(CliError::fail)?;
    let text = format!("{} files written to {}\n", files.len(), a.out.display());
    Ok((text, json!({ "out": a.out, "files": files })))
}

fn cmd_report(a: &ReportArgs) -> CliResult {
    if a.path.is_dir() {
        let index = ResultsStore::new(&a.path).index().map_err(CliError::fail)?;
        let mut text = format!("{:<18}{:<8}{:>16}\n", "fingerprint", "preset", "acc / F1");
        for (fp, e) in &index {
            text.push_str(&format!(
                "{:<18}{:<8}{:>16}\n",
                &fp[..16.min(fp.len())],
                e.preset.as_deref().unwrap_or("-"),
                format!("{:.1}% / {:.1}%", 100.0 * e.accuracy, 100.0 * e.macro_f1)
            ));
        }
        return Ok((text, serde_json::to_value(&index).expect("index serializes")));
    }
    let body = std::fs::read_to_string(&a.path).map_err(|e| CliError::fail(format!("{}: {e}", a.path.display())))?;
    let report = ExperimentReport::from_json(&body).map_err(CliError::fail)?;
    Ok((report.render_table(), serde_json::to_value(&report).expect("report serializes")))
}

fn cmd_preset(a: &PresetArgs) -> CliResult {
    let config = a.preset.config(&a.data, &Catalog::opportunity());
    config.save(&a.out).map_err(CliError::fail)?;
    Ok((
        format!("config written to {}\n", a.out.display()),
        json!({ "config_path": a.out, "config_fingerprint": config.fingerprint() }),
    ))
}

fn cmd_reproduce(a: &ReproduceArgs) -> CliResult {
    if !a.data.is_dir() {
        return Err(CliError::fail(format!("dataset: {} is not a directory", a.data.display())));
    }
    let catalog = Catalog::opportunity();
    let store = ResultsStore::new(&a.out);
    let mut measured = Vec::new();
    for p in PresetId::ALL {
        let mut config = p.config(&a.data, &catalog);
        if let Some(s) = a.seed {
            config.seed = s;
        }
        let (report, _) = run_and_store(&config, &store).map_err(CliError::fail)?;
        measured.push((p, report.pooled.accuracy, report.pooled.macro_f1));
    }
    let rep = compare(&measured);
    let path = a.out.join("reproduction.json");
    write_file(&path, &format!("{}\n", serde_json::to_string_pretty(&rep).expect("json")))?;
    Ok((rep.render_table(), serde_json::to_value(&rep).expect("json")))
}
