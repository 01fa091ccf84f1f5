#ifndef HAR_PIONEER_H
#define HAR_PIONEER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum {
  HAR_STATUS_OK = 0,
  HAR_STATUS_NULL_ARGUMENT = 1,
  HAR_STATUS_INVALID_UTF8 = 2,
  HAR_STATUS_INVALID_ARGUMENT = 3,
  HAR_STATUS_NOT_FOUND = 4,
  HAR_STATUS_IO = 5,
  HAR_STATUS_BUFFER_TOO_SMALL = 6,
  HAR_STATUS_FAILED = 7,
  HAR_STATUS_PANIC = 8,
} HarStatus;

// Sensor location catalog.
typedef struct HarCatalog HarCatalog;

// Experiment configuration.
typedef struct HarConfig HarConfig;

// Result of one experiment run.
typedef struct HarReport HarReport;

// Parsed LLM suggestions.
typedef struct HarSuggestions HarSuggestions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next call into the library from the same thread. Do not free.
const char *har_last_error(void);

// Library version as a static string. Do not free.
const char *har_version(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string from this library not yet freed.
void har_string_free(char *s);

// The built-in OPPORTUNITY catalog.
//
// # Safety
// `out` must be writable.
HarStatus har_catalog_opportunity(HarCatalog **out);

// Load a catalog from a TOML file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
HarStatus har_catalog_load(const char *path, HarCatalog **out);

// # Safety
// `c` must be NULL or a catalog handle not yet freed.
void har_catalog_free(HarCatalog *c);

// Number of sensor locations.
//
// # Safety
// `c` must be a live handle and `out` writable.
HarStatus har_catalog_len(const HarCatalog *c, uintptr_t *out);

// Resolve a free-text location name to its catalog id.
// Returns `NotFound` when the name matches nothing or is ambiguous.
//
// # Safety
// `c` must be a live handle, `name` a NUL-terminated string, `out_id` writable.
HarStatus har_catalog_resolve(const HarCatalog *c, const char *name, char **out_id);

// Fill NaN runs in place with the mean of their neighbours.
//
// # Safety
// `data` must point to `len` writable doubles.
HarStatus har_impute(double *data, uintptr_t len);

// Number of sliding windows over `n` samples.
//
// # Safety
// `out` must be writable.
HarStatus har_window_count(uintptr_t n,
                           double window_s,
                           double overlap_frac,
                           double sample_rate_hz,
                           uintptr_t *out);

// Compute one feature over a window.
//
// Single-axis features read `x` only and `y`/`z` may be NULL; `sma`,
// `axis_corr` and `pitch_roll` need all three. `param` overrides the bin
// count for `entropy` or the coefficient count for `fft_coeffs`; pass 0 for
// the default. Values are written to `out` (capacity `cap`) and their number
// to `written`. If `cap` is too small, `BufferTooSmall` is returned and
// `written` holds the required size.
//
// # Safety
// `feature` must be a NUL-terminated string, each non-NULL axis must point
// to `len` doubles, `out` to `cap` writable doubles, `written` writable.
HarStatus har_extract(const char *feature,
                      const double *x,
                      const double *y,
                      const double *z,
                      uintptr_t len,
                      double sample_rate_hz,
                      uint32_t param,
                      double *out,
                      uintptr_t cap,
                      uintptr_t *written);

// Parse a sensor-pioneering reply against a catalog.
//
// # Safety
// `reply` must be a NUL-terminated string, `c` a live handle, `out` writable.
HarStatus har_parse_sensors(const char *reply, const HarCatalog *c, HarSuggestions **out);

// Parse a feature-augmentation reply against the feature registry.
//
// # Safety
// `reply` must be a NUL-terminated string and `out` writable.
HarStatus har_parse_features(const char *reply, HarSuggestions **out);

// Load a suggestion set written by the `pioneer` command.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
HarStatus har_suggestions_from_json(const char *json, HarSuggestions **out);

// # Safety
// `s` must be NULL or a suggestions handle not yet freed.
void har_suggestions_free(HarSuggestions *s);

// Number of resolved ids.
//
// # Safety
// `s` must be a live handle and `out` writable.
HarStatus har_suggestions_resolved_len(const HarSuggestions *s, uintptr_t *out);

// Resolved id at `index`.
//
// # Safety
// `s` must be a live handle and `out` writable.
HarStatus har_suggestions_resolved_at(const HarSuggestions *s, uintptr_t index, char **out);

// The whole set as JSON, in the format the CLI writes.
//
// # Safety
// `s` must be a live handle and `out` writable.
HarStatus har_suggestions_to_json(const HarSuggestions *s, char **out);

// Config for a preset letter (`a`..`f`) over a dataset directory.
//
// # Safety
// `preset` and `dataset_root` must be NUL-terminated strings, `out` writable.
HarStatus har_config_preset(const char *preset, const char *dataset_root, HarConfig **out);

// Config from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` writable.
HarStatus har_config_from_toml(const char *toml, HarConfig **out);

// # Safety
// `c` must be NULL or a config handle not yet freed.
void har_config_free(HarConfig *c);

// # Safety
// `c` must be a live handle and `out` writable.
HarStatus har_config_to_toml(const HarConfig *c, char **out);

// Stable hash of the config, used to name result files.
//
// # Safety
// `c` must be a live handle and `out` writable.
HarStatus har_config_fingerprint(const HarConfig *c, char **out);

// # Safety
// `c` must be a live handle.
HarStatus har_config_set_seed(HarConfig *c, uint64_t seed);

// Merge suggestions into the config (`replace` = 0) or swap the sensor or
// feature list for exactly the suggested items (`replace` != 0).
//
// # Safety
// `c` and `s` must be live handles.
HarStatus har_config_apply(HarConfig *c, const HarSuggestions *s, int32_t replace);

// Render the sensor-pioneering prompt with the built-in templates.
//
// `variant` is `'A'` or `'B'`. Variant B needs `report`, which is either an
// experiment report or an evaluation report as JSON text.
//
// # Safety
// `c` must be a live handle, `report` NULL or a NUL-terminated string, `out` writable.
HarStatus har_render_sensor_prompt(const HarConfig *c,
                                   char variant,
                                   const char *report,
                                   char **out);

// Render the feature-augmentation prompt with the built-in templates.
//
// # Safety
// `c` must be a live handle and `out` writable.
HarStatus har_render_feature_prompt(const HarConfig *c, char **out);

// Write a synthetic dataset in the OPPORTUNITY file layout.
//
// `locations` is a comma-separated list of location ids, or NULL for all
// locations of the catalog.
//
// # Safety
// `out_dir` must be a NUL-terminated string, `c` a live handle, `locations`
// NULL or a NUL-terminated string.
HarStatus har_synthesize(const char *out_dir,
                         const HarCatalog *c,
                         uint64_t seed,
                         uintptr_t n_subjects,
                         double duration_s,
                         const char *locations);

// Train and evaluate one configuration.
//
// # Safety
// `c` must be a live handle and `out` writable.
HarStatus har_run(const HarConfig *c, HarReport **out);

// # Safety
// `r` must be NULL or a report handle not yet freed.
void har_report_free(HarReport *r);

// Pooled accuracy and macro-F1, both in [0, 1].
//
// # Safety
// `r` must be a live handle, `accuracy` and `macro_f1` writable.
HarStatus har_report_scores(const HarReport *r, double *accuracy, double *macro_f1);

// # Safety
// `r` must be a live handle and `out` writable.
HarStatus har_report_to_json(const HarReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAR_PIONEER_H */
