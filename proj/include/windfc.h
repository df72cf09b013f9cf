/*
 * windfc — offshore wind forecasting toolkit, C interface.
 *
 * Every function returns a wf_status; on failure wf_last_error() carries a
 * message for the calling thread. Strings returned through char** are heap
 * allocated and must be released with wf_string_free(). Handles are opaque
 * and freed with their matching *_free().
 *
 * Structured options are passed as JSON text; unknown keys are ignored and
 * all keys are optional unless noted. See README.md for the schemas.
 */
#ifndef WINDFC_H
#define WINDFC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct wf_series wf_series;   /* repaired, cadence-complete series */
typedef struct wf_turbine wf_turbine; /* turbine/site constants incl. derived cp */
typedef struct wf_model wf_model;     /* trained predictor + normalizer */

typedef enum wf_status {
    WF_OK = 0,
    WF_ERR_USAGE = 1,   /* bad arguments or options */
    WF_ERR_DATA = 2,    /* unreadable/inconsistent input data */
    WF_ERR_NUMERIC = 3, /* numeric failure: divergence, singular system, domain */
    WF_ERR_INTERNAL = 4
} wf_status;

const char* wf_last_error(void);
void wf_string_free(char* s);

/* --- series ---------------------------------------------------------------- */

/* Parses NDBC standard-met text or named-column CSV, then repairs to a
 * complete grid at the given cadence (minutes). */
wf_status wf_series_load(const char* path, int cadence_minutes, wf_series** out);
/* Synthetic series; options: {"rows","seed","cadence_minutes","weibull_shape",
 * "weibull_scale","ar_a","ar_b","temp_coupling"} */
wf_status wf_series_from_fixture(const char* options_json, wf_series** out);
wf_status wf_series_rows(const wf_series* s, size_t* out);
wf_status wf_series_summary_json(const wf_series* s, char** json_out);
wf_status wf_series_write_csv(const wf_series* s, const char* path);
wf_status wf_series_write_repair_log(const wf_series* s, const char* path);
void wf_series_free(wf_series* s);

/* --- turbine ----------------------------------------------------------------- */

wf_status wf_turbine_default(wf_turbine** out);
wf_status wf_turbine_from_json_file(const char* path, wf_turbine** out);
wf_status wf_turbine_info_json(const wf_turbine* t, char** json_out);
/* Log-profile mapping from from_height to hub height. */
wf_status wf_turbine_extrapolate(const wf_turbine* t, double speed, double from_height,
                                 double* hub_speed_out);
/* Banded power curve, watts. */
wf_status wf_turbine_power(const wf_turbine* t, double hub_speed, double* watts_out);
void wf_turbine_free(wf_turbine* t);

/* --- feature analysis ---------------------------------------------------------- */

/* Correlation matrix, forest importances and the selection outcome as one
 * JSON document. Options: {"target","candidates":[...],"seed",
 * "forest":{"trees","max_depth","min_samples_split"},
 * "policy":{"low_corr","block"},"out_dir"}; when out_dir is set the CSV/JSON
 * exports are written there. */
wf_status wf_features_report(const wf_series* s, const char* options_json, char** json_out);

/* --- models ------------------------------------------------------------------ */

/* Options: {"kind":"ridge|fcnn|gru","lambda","hidden",
 * "window":{"past_steps","horizon_steps"},"inputs":[...],"target",
 * "train":{"seed","learning_rate","epochs","batch","patience"}} */
wf_status wf_train(const wf_series* s, const wf_turbine* t, const char* options_json,
                   wf_model** out, char** summary_json_out);
wf_status wf_model_save(const wf_model* m, const char* path);
wf_status wf_model_load(const char* path, wf_model** out);
wf_status wf_model_info_json(const wf_model* m, char** json_out);
/* Slides the model over the whole series; writes timestamp,actual,predicted
 * rows and returns the evaluation as JSON. */
wf_status wf_model_predict_csv(const wf_model* m, const wf_series* s, const wf_turbine* t,
                               const char* out_csv_path, char** metrics_json_out);
void wf_model_free(wf_model* m);

/* --- experiments ----------------------------------------------------------------- */

/* Nine-case matrix. Options: {"models":["ridge",...],"seed","threads",
 * "window":{...},"train":{...}}. Writes results.csv, results.json and radar
 * SVGs into out_dir (created if needed); returns the results document. */
wf_status wf_run_cases(const wf_series* s, const wf_turbine* t, const char* options_json,
                       const char* out_dir, char** summary_json_out);
/* Window-size sweep. Options: {"model","seed","threads","past_hours":[...],
 * "horizon_minutes":[...],"inputs":[...],"target","train":{...}}. */
wf_status wf_run_sweep(const wf_series* s, const wf_turbine* t, const char* options_json,
                       const char* out_csv_path, char** summary_json_out);
/* Writes the synthetic fixture as an ingestible CSV. */
wf_status wf_fixture_write_csv(const char* options_json, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* WINDFC_H */
