//! C ABI over the `har_pioneer` crate.
//!
//! Every fallible function returns a [`HarStatus`]. On failure the message is
//! kept per thread and can be read with [`har_last_error`]. Objects cross the
//! boundary as opaque handles that the caller frees with the matching
//! `*_free` function. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`har_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use har_pioneer::experiment::{
    apply_suggestions, run, synthesize_dataset, ApplyMode, ExperimentConfig, ExperimentReport, PresetId, SynthOptions,
};
use har_pioneer::features::{self as feat, FeatureKind, FeatureSpec};
use har_pioneer::ingest::{impute_in_place, Catalog};
use har_pioneer::model::EvaluationReport;
use har_pioneer::pioneer::{
    parse_feature_suggestions, parse_sensor_suggestions, render_feature_prompt, render_sensor_prompt, PromptContext,
    SuggestionSet, TemplateSet, Variant,
};
use har_pioneer::windowing::WindowGeometry;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NotFound = 4,
    Io = 5,
    BufferTooSmall = 6,
    Failed = 7,
    Panic = 8,
}

/// Sensor location catalog.
pub struct HarCatalog(Catalog);

/// Parsed LLM suggestions.
pub struct HarSuggestions(SuggestionSet);

/// Experiment configuration.
pub struct HarConfig(ExperimentConfig);

/// Result of one experiment run.
pub struct HarReport(ExperimentReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error {
    status: HarStatus,
    message: String,
}

impl Error {
    fn new(status: HarStatus, message: impl std::fmt::Display) -> Self {
        Self {
            status,
            message: message.to_string(),
        }
    }

    fn invalid(message: impl std::fmt::Display) -> Self {
        Self::new(HarStatus::InvalidArgument, message)
    }

    fn failed(message: impl std::fmt::Display) -> Self {
        Self::new(HarStatus::Failed, message)
    }
}

type FfiResult = Result<(), Error>;

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult) -> HarStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HarStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.message);
            e.status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            HarStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> FfiResult {
    if p.is_null() {
        Err(Error::new(HarStatus::NullArgument, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Error> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::new(HarStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn opt_text<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Error> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, name).map(Some)
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Error> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `out` must be null or writable.
unsafe fn put<T>(out: *mut T, value: T) -> FfiResult {
    non_null(out, "out")?;
    out.write(value);
    Ok(())
}

/// # Safety
/// `out` must be null or writable.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult {
    let c = CString::new(s).map_err(|_| Error::failed("string contains NUL"))?;
    put(out, c.into_raw())
}

/// # Safety
/// `out` must be null or writable.
unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> FfiResult {
    put(out, Box::into_raw(Box::new(value)))
}

/// # Safety
/// `h` must be null or a live handle from this library.
unsafe fn handle<'a, T>(h: *const T, name: &str) -> Result<&'a T, Error> {
    non_null(h, name)?;
    Ok(&*h)
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread. Do not free.
#[no_mangle]
pub extern "C" fn har_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string. Do not free.
#[no_mangle]
pub extern "C" fn har_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn har_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- catalog ----

/// The built-in OPPORTUNITY catalog.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn har_catalog_opportunity(out: *mut *mut HarCatalog) -> HarStatus {
    guard(|| put_handle(out, HarCatalog(Catalog::opportunity())))
}

/// Load a catalog from a TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_catalog_load(path: *const c_char, out: *mut *mut HarCatalog) -> HarStatus {
    guard(|| {
        let path = text(path, "path")?;
        let cat = Catalog::load(Path::new(path)).map_err(|e| Error::new(HarStatus::Io, e))?;
        put_handle(out, HarCatalog(cat))
    })
}

/// # Safety
/// `c` must be NULL or a catalog handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn har_catalog_free(c: *mut HarCatalog) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of sensor locations.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_catalog_len(c: *const HarCatalog, out: *mut usize) -> HarStatus {
    guard(|| put(out, handle(c, "catalog")?.0.locations().len()))
}

/// Resolve a free-text location name to its catalog id.
/// Returns `NotFound` when the name matches nothing or is ambiguous.
///
/// # Safety
/// `c` must be a live handle, `name` a NUL-terminated string, `out_id` writable.
#[no_mangle]
pub unsafe extern "C" fn har_catalog_resolve(
    c: *const HarCatalog,
    name: *const c_char,
    out_id: *mut *mut c_char,
) -> HarStatus {
    guard(|| {
        let cat = &handle(c, "catalog")?.0;
        let loc = cat
            .resolve(text(name, "name")?)
            .map_err(|e| Error::new(HarStatus::NotFound, e))?;
        put_string(out_id, loc.id.clone())
    })
}

// ---- signal processing ----

/// Fill NaN runs in place with the mean of their neighbours.
///
/// # Safety
/// `data` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn har_impute(data: *mut f64, len: usize) -> HarStatus {
    guard(|| {
        if len == 0 {
            return Ok(());
        }
        non_null(data, "data")?;
        impute_in_place(std::slice::from_raw_parts_mut(data, len));
        Ok(())
    })
}

/// Number of sliding windows over `n` samples.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn har_window_count(
    n: usize,
    window_s: f64,
    overlap_frac: f64,
    sample_rate_hz: f64,
    out: *mut usize,
) -> HarStatus {
    guard(|| {
        let g = WindowGeometry::new(window_s, overlap_frac, sample_rate_hz).map_err(Error::invalid)?;
        put(out, g.count(n))
    })
}

fn extract(kind: FeatureKind, axes: [&[f64]; 3], fs: f64, param: u32) -> Result<Vec<f64>, feat::FeatureError> {
    let [x, y, z] = axes;
    let mut spec = FeatureSpec::new(kind);
    if param > 0 {
        let key = match kind {
            FeatureKind::Entropy => "bins",
            FeatureKind::FftCoeffs => "k",
            _ => "",
        };
        if !key.is_empty() {
            spec = spec.with_param(key, param);
        }
    }
    spec.validate()?;
    Ok(match kind {
        FeatureKind::Mean => vec![feat::basic_stats(x)?.mean],
        FeatureKind::Std => vec![feat::basic_stats(x)?.std],
        FeatureKind::Var => vec![feat::basic_stats(x)?.var],
        FeatureKind::Min => vec![feat::basic_stats(x)?.min],
        FeatureKind::Max => vec![feat::basic_stats(x)?.max],
        FeatureKind::Sma => vec![feat::sma(x, y, z)?],
        FeatureKind::Energy => vec![feat::energy(x)?],
        FeatureKind::Entropy => vec![feat::entropy(x, spec.bins())?],
        FeatureKind::Zcr => vec![feat::zero_crossing_rate(x)?],
        FeatureKind::Mcr => vec![feat::mean_crossing_rate(x)?],
        FeatureKind::FftCoeffs => feat::fft_coefficients(x, spec.k())?,
        FeatureKind::AxisCorr => vec![
            feat::axis_correlation(x, y)?,
            feat::axis_correlation(x, z)?,
            feat::axis_correlation(y, z)?,
        ],
        FeatureKind::PitchRoll => {
            let (p, r) = feat::pitch_roll(x, y, z)?;
            vec![p, r]
        }
        FeatureKind::Jerk => vec![feat::jerk(x, fs)?],
        FeatureKind::PeakFreq => vec![feat::peak_frequency(x, fs)?],
    })
}

/// Compute one feature over a window.
///
/// Single-axis features read `x` only and `y`/`z` may be NULL; `sma`,
/// `axis_corr` and `pitch_roll` need all three. `param` overrides the bin
/// count for `entropy` or the coefficient count for `fft_coeffs`; pass 0 for
/// the default. Values are written to `out` (capacity `cap`) and their number
/// to `written`. If `cap` is too small, `BufferTooSmall` is returned and
/// `written` holds the required size.
///
/// # Safety
/// `feature` must be a NUL-terminated string, each non-NULL axis must point
/// to `len` doubles, `out` to `cap` writable doubles, `written` writable.
#[no_mangle]
pub unsafe extern "C" fn har_extract(
    feature: *const c_char,
    x: *const f64,
    y: *const f64,
    z: *const f64,
    len: usize,
    sample_rate_hz: f64,
    param: u32,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> HarStatus {
    guard(|| {
        let kind: FeatureKind = text(feature, "feature")?.parse().map_err(Error::invalid)?;
        non_null(written, "written")?;
        let x = slice(x, len, "x")?;
        let (y, z) = if kind.is_triad() {
            (slice(y, len, "y")?, slice(z, len, "z")?)
        } else {
            (x, x)
        };
        let values = extract(kind, [x, y, z], sample_rate_hz, param).map_err(Error::invalid)?;
        written.write(values.len());
        if values.len() > cap {
            return Err(Error::new(
                HarStatus::BufferTooSmall,
                format!("{} values, buffer holds {cap}", values.len()),
            ));
        }
        if !values.is_empty() {
            non_null(out, "out")?;
            ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        }
        Ok(())
    })
}

// ---- suggestions ----

/// Parse a sensor-pioneering reply against a catalog.
///
/// # Safety
/// `reply` must be a NUL-terminated string, `c` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_parse_sensors(
    reply: *const c_char,
    c: *const HarCatalog,
    out: *mut *mut HarSuggestions,
) -> HarStatus {
    guard(|| {
        let set = parse_sensor_suggestions(text(reply, "reply")?, &handle(c, "catalog")?.0);
        put_handle(out, HarSuggestions(set))
    })
}

/// Parse a feature-augmentation reply against the feature registry.
///
/// # Safety
/// `reply` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_parse_features(reply: *const c_char, out: *mut *mut HarSuggestions) -> HarStatus {
    guard(|| put_handle(out, HarSuggestions(parse_feature_suggestions(text(reply, "reply")?))))
}

/// Load a suggestion set written by the `pioneer` command.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_suggestions_from_json(json: *const c_char, out: *mut *mut HarSuggestions) -> HarStatus {
    guard(|| {
        let set: SuggestionSet = serde_json::from_str(text(json, "json")?).map_err(Error::invalid)?;
        put_handle(out, HarSuggestions(set))
    })
}

/// # Safety
/// `s` must be NULL or a suggestions handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn har_suggestions_free(s: *mut HarSuggestions) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of resolved ids.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_suggestions_resolved_len(s: *const HarSuggestions, out: *mut usize) -> HarStatus {
    guard(|| put(out, handle(s, "suggestions")?.0.resolved.len()))
}

/// Resolved id at `index`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_suggestions_resolved_at(
    s: *const HarSuggestions,
    index: usize,
    out: *mut *mut c_char,
) -> HarStatus {
    guard(|| {
        let set = &handle(s, "suggestions")?.0;
        let id = set
            .resolved
            .get(index)
            .ok_or_else(|| Error::invalid(format!("index {index} out of range ({})", set.resolved.len())))?;
        put_string(out, id.clone())
    })
}

/// The whole set as JSON, in the format the CLI writes.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_suggestions_to_json(s: *const HarSuggestions, out: *mut *mut c_char) -> HarStatus {
    guard(|| {
        let json = serde_json::to_string_pretty(&handle(s, "suggestions")?.0).map_err(Error::failed)?;
        put_string(out, json)
    })
}

// ---- configuration ----

/// Config for a preset letter (`a`..`f`) over a dataset directory.
///
/// # Safety
/// `preset` and `dataset_root` must be NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_config_preset(
    preset: *const c_char,
    dataset_root: *const c_char,
    out: *mut *mut HarConfig,
) -> HarStatus {
    guard(|| {
        let id: PresetId = text(preset, "preset")?.parse().map_err(Error::invalid)?;
        let root = text(dataset_root, "dataset_root")?;
        put_handle(out, HarConfig(id.config(Path::new(root), &Catalog::opportunity())))
    })
}

/// Config from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_config_from_toml(toml: *const c_char, out: *mut *mut HarConfig) -> HarStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_toml_str(text(toml, "toml")?).map_err(Error::invalid)?;
        put_handle(out, HarConfig(cfg))
    })
}

/// # Safety
/// `c` must be NULL or a config handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn har_config_free(c: *mut HarConfig) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_config_to_toml(c: *const HarConfig, out: *mut *mut c_char) -> HarStatus {
    guard(|| put_string(out, handle(c, "config")?.0.to_toml_string()))
}

/// Stable hash of the config, used to name result files.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_config_fingerprint(c: *const HarConfig, out: *mut *mut c_char) -> HarStatus {
    guard(|| put_string(out, handle(c, "config")?.0.fingerprint()))
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn har_config_set_seed(c: *mut HarConfig, seed: u64) -> HarStatus {
    guard(|| {
        non_null(c, "config")?;
        (*c).0.seed = seed;
        Ok(())
    })
}

/// Merge suggestions into the config (`replace` = 0) or swap the sensor or
/// feature list for exactly the suggested items (`replace` != 0).
///
/// # Safety
/// `c` and `s` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn har_config_apply(c: *mut HarConfig, s: *const HarSuggestions, replace: i32) -> HarStatus {
    guard(|| {
        non_null(c, "config")?;
        let set = &handle(s, "suggestions")?.0;
        let mode = if replace != 0 { ApplyMode::Replace } else { ApplyMode::Union };
        let next = apply_suggestions(&(*c).0, set, mode).map_err(Error::invalid)?;
        (*c).0 = next;
        Ok(())
    })
}

// ---- prompts ----

fn prompt_context(cfg: &ExperimentConfig, evaluation: Option<EvaluationReport>) -> Result<PromptContext, Error> {
    let catalog = cfg.load_catalog().map_err(Error::invalid)?;
    Ok(PromptContext::new(&catalog, &cfg.sensors, &cfg.features, evaluation)
        .map_err(Error::invalid)?
        .with_window(cfg.window_s, cfg.overlap_frac, cfg.sample_rate_hz))
}

/// Render the sensor-pioneering prompt with the built-in templates.
///
/// `variant` is `'A'` or `'B'`. Variant B needs `report`, which is either an
/// experiment report or an evaluation report as JSON text.
///
/// # Safety
/// `c` must be a live handle, `report` NULL or a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_render_sensor_prompt(
    c: *const HarConfig,
    variant: c_char,
    report: *const c_char,
    out: *mut *mut c_char,
) -> HarStatus {
    guard(|| {
        let cfg = &handle(c, "config")?.0;
        let variant: Variant = (variant as u8 as char).to_string().parse().map_err(Error::invalid)?;
        let evaluation = match opt_text(report, "report")? {
            None => None,
            Some(t) => Some(match ExperimentReport::from_json(t) {
                Ok(r) => r.pooled,
                Err(_) => serde_json::from_str::<EvaluationReport>(t).map_err(Error::invalid)?,
            }),
        };
        let ctx = prompt_context(cfg, evaluation)?;
        let prompt = render_sensor_prompt(&TemplateSet::default(), &ctx, variant).map_err(Error::invalid)?;
        put_string(out, prompt)
    })
}

/// Render the feature-augmentation prompt with the built-in templates.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_render_feature_prompt(c: *const HarConfig, out: *mut *mut c_char) -> HarStatus {
    guard(|| {
        let ctx = prompt_context(&handle(c, "config")?.0, None)?;
        let prompt = render_feature_prompt(&TemplateSet::default(), &ctx).map_err(Error::invalid)?;
        put_string(out, prompt)
    })
}

// ---- experiments ----

/// Write a synthetic dataset in the OPPORTUNITY file layout.
///
/// `locations` is a comma-separated list of location ids, or NULL for all
/// locations of the catalog.
///
/// # Safety
/// `out_dir` must be a NUL-terminated string, `c` a live handle, `locations`
/// NULL or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn har_synthesize(
    out_dir: *const c_char,
    c: *const HarCatalog,
    seed: u64,
    n_subjects: usize,
    duration_s: f64,
    locations: *const c_char,
) -> HarStatus {
    guard(|| {
        let dir = text(out_dir, "out_dir")?;
        let catalog = &handle(c, "catalog")?.0;
        let opts = SynthOptions {
            seed,
            n_subjects,
            duration_s,
            locations: opt_text(locations, "locations")?
                .map(|l| l.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
            ..SynthOptions::default()
        };
        synthesize_dataset(Path::new(dir), catalog, &opts).map_err(Error::failed)?;
        Ok(())
    })
}

/// Train and evaluate one configuration.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_run(c: *const HarConfig, out: *mut *mut HarReport) -> HarStatus {
    guard(|| {
        let report = run(&handle(c, "config")?.0).map_err(Error::failed)?;
        put_handle(out, HarReport(report))
    })
}

/// # Safety
/// `r` must be NULL or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn har_report_free(r: *mut HarReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Pooled accuracy and macro-F1, both in [0, 1].
///
/// # Safety
/// `r` must be a live handle, `accuracy` and `macro_f1` writable.
#[no_mangle]
pub unsafe extern "C" fn har_report_scores(r: *const HarReport, accuracy: *mut f64, macro_f1: *mut f64) -> HarStatus {
    guard(|| {
        let rep = &handle(r, "report")?.0;
        non_null(macro_f1, "macro_f1")?;
        put(accuracy, rep.pooled.accuracy)?;
        put(macro_f1, rep.pooled.macro_f1)
    })
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn har_report_to_json(r: *const HarReport, out: *mut *mut c_char) -> HarStatus {
    guard(|| put_string(out, handle(r, "report")?.0.to_json()))
}
