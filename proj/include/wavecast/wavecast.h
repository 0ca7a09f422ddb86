/* C interface to the wavecast forecasting library.
 *
 * Every function returning wc_status sets a thread-local message readable
 * with wc_last_error() on failure. Handles are opaque and owned by the
 * caller; free them with the matching *_free function. Pointers returned by
 * accessors stay valid until the owning handle is freed or modified.
 */
#ifndef WAVECAST_WAVECAST_H
#define WAVECAST_WAVECAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(WAVECAST_BUILDING_LIBRARY)
#define WC_API __attribute__((visibility("default")))
#else
#define WC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wc_status {
    WC_OK = 0,
    WC_ERR_CONFIG = 1,   /* inconsistent shapes or settings */
    WC_ERR_USAGE = 2,    /* invalid arguments */
    WC_ERR_NUMERIC = 3,  /* non-finite values, divergence */
    WC_ERR_DATA = 4,     /* bad input data */
    WC_ERR_FORMAT = 5,   /* corrupt or incompatible file */
    WC_ERR_IO = 6,
    WC_ERR_INTERNAL = 7
} wc_status;

WC_API const char* wc_version(void);
WC_API const char* wc_status_name(wc_status status);
/* Message of the last failed call on this thread; "" if none. */
WC_API const char* wc_last_error(void);
/* Frees strings returned through char** out-parameters. */
WC_API void wc_string_free(char* s);

/* ---- series ------------------------------------------------------------ */

typedef struct wc_series wc_series;

/* Copies the arrays. cond_names and conds may be NULL when n_conds is 0. */
WC_API wc_status wc_series_create(const char* target_name, const double* target, size_t length,
                                  const char* const* cond_names, const double* const* conds, size_t n_conds,
                                  wc_series** out);
/* timestamp_column may be NULL. forward_fill != 0 fills empty cells from the row above. */
WC_API wc_status wc_series_load_csv(const char* path, const char* target, const char* const* conds, size_t n_conds,
                                    const char* timestamp_column, int forward_fill, wc_series** out);
WC_API void wc_series_free(wc_series* s);

WC_API size_t wc_series_length(const wc_series* s);
WC_API size_t wc_series_num_conditions(const wc_series* s);
WC_API const double* wc_series_target(const wc_series* s);
WC_API const char* wc_series_target_name(const wc_series* s);
/* NULL when index is out of range. */
WC_API const double* wc_series_condition(const wc_series* s, size_t index);
WC_API const char* wc_series_condition_name(const wc_series* s, size_t index);
/* NULL when the series has no timestamps or index is out of range. */
WC_API const char* wc_series_timestamp(const wc_series* s, size_t index);

WC_API wc_status wc_series_to_returns(const wc_series* prices, wc_series** out);
/* Standardizes every series with mean/std pooled over rows [train_begin, train_begin + train_len). */
WC_API wc_status wc_series_normalize(const wc_series* s, size_t train_begin, size_t train_len, wc_series** out);
/* *has_norm is 0 for a series that was never normalized. */
WC_API wc_status wc_series_norm(const wc_series* s, int* has_norm, double* mu, double* sigma);
/* Rows [begin, end). */
WC_API wc_status wc_series_slice(const wc_series* s, size_t begin, size_t end, wc_series** out);

/* ---- Lorenz ------------------------------------------------------------- */

typedef struct wc_lorenz_config {
    double sigma;
    double rho;
    double beta;
    double x0;
    double y0;
    double z0;
    size_t num_points;
    double dt;        /* sample spacing */
    size_t substeps;  /* RK4 steps per sample */
    int as_printed;   /* nonzero: dZ/dt = XY - beta*Y */
} wc_lorenz_config;

WC_API void wc_lorenz_config_default(wc_lorenz_config* config);
/* x, y, z each hold config->num_points values. */
WC_API wc_status wc_lorenz_generate(const wc_lorenz_config* config, double* x, double* y, double* z);

/* ---- splits ------------------------------------------------------------- */

typedef struct wc_split {
    size_t train_begin;
    size_t train_end;
    size_t test_begin;
    size_t test_end;
} wc_split;

/* Writes up to `capacity` splits and sets *count to the total number. */
WC_API wc_status wc_make_splits(size_t length, size_t train_len, size_t test_len, wc_split* out, size_t capacity,
                                size_t* count);

/* ---- network configuration -------------------------------------------- */

enum { WC_MAX_LAYERS = 32 };

typedef struct wc_network_config {
    size_t layers;
    size_t taps;
    size_t channels[WC_MAX_LAYERS]; /* first `layers` entries used */
    size_t num_conditions;
    int final_relu;                 /* nonzero: ReLU on layer L; zero: linear */
} wc_network_config;

WC_API void wc_network_config_default(wc_network_config* config);
WC_API wc_status wc_network_receptive_field(const wc_network_config* config, size_t* out);
/* Trailing inputs one prediction sees; also the left padding. */
WC_API wc_status wc_network_history_length(const wc_network_config* config, size_t* out);
WC_API wc_status wc_network_parameter_count(const wc_network_config* config, size_t* out);

/* ---- train configuration ---------------------------------------------- */

typedef struct wc_train_config {
    size_t iterations;
    double learning_rate;
    double l2_gamma;
    double adam_beta1;
    double adam_beta2;
    double adam_eps;
    size_t num_seeds;
    size_t seed_pool;
    double discard_ratio;
    uint64_t base_seed;
    size_t jobs;
} wc_train_config;

WC_API void wc_train_config_default(wc_train_config* config);
/* Overrides fields of *config with the keys of a JSON object file. */
WC_API wc_status wc_train_config_load(const char* path, wc_train_config* config);
WC_API wc_status wc_train_config_merge_json(const char* json_text, wc_train_config* config);
WC_API wc_status wc_train_config_to_json(const wc_train_config* config, char** out);

/* ---- models ------------------------------------------------------------- */

typedef enum wc_model_kind { WC_MODEL_WAVENET = 0, WC_MODEL_AR = 1 } wc_model_kind;

typedef struct wc_model wc_model;

/* Training provenance carried in checkpoints. Strings are copied on set. */
typedef struct wc_model_info {
    const char* target_name;
    const char* const* condition_names;
    size_t num_condition_names;
    int has_norm;
    double norm_mu;
    double norm_sigma;
    uint64_t seed;
    double train_mae;
    size_t train_begin;
    size_t train_end;
} wc_model_info;

/* Freshly initialised network. */
WC_API wc_status wc_model_create_wavenet(const wc_network_config* config, uint64_t seed, wc_model** out);
/* OLS fit on `n_features` aligned series of `length` values; feature 0 is the target. */
WC_API wc_status wc_model_fit_ar(const double* const* features, size_t n_features, size_t length, size_t order,
                                 wc_model** out);
WC_API wc_status wc_model_load(const char* path, wc_model** out);
WC_API wc_status wc_model_save(const wc_model* model, const char* path);
WC_API void wc_model_free(wc_model* model);

WC_API wc_model_kind wc_model_get_kind(const wc_model* model);
/* Pointers in *info stay valid until the model is modified or freed. */
WC_API wc_status wc_model_get_info(const wc_model* model, wc_model_info* info);
WC_API wc_status wc_model_set_info(wc_model* model, const wc_model_info* info);
WC_API wc_status wc_model_network_config(const wc_model* model, wc_network_config* out);
/* Fails with WC_ERR_FORMAT and a field diff when the stored network differs. */
WC_API wc_status wc_model_check_network(const wc_model* model, const wc_network_config* expected);
/* Minimum history for one prediction: history length (network) or order (AR). */
WC_API wc_status wc_model_history_length(const wc_model* model, size_t* out);
/* Number of condition / extra feature series the model consumes. */
WC_API size_t wc_model_num_conditions(const wc_model* model);
/* Sets every weight and bias to zero (network only). */
WC_API wc_status wc_model_zero_weights(wc_model* model);
/* AR coefficient of `source` at `lag` (1-based) for `feature`. */
WC_API wc_status wc_model_ar_coefficient(const wc_model* model, size_t feature, size_t lag, size_t source,
                                         double* out);
WC_API wc_status wc_model_ar_intercept(const wc_model* model, size_t feature, double* out);

/* Network output for a whole series: out holds length + 1 values, out[i]
 * predicting x[i] from the preceding values. */
WC_API wc_status wc_model_forward(const wc_model* model, const double* x, size_t length, const double* const* conds,
                                  size_t n_conds, double* out);
/* One-step forecast from windows whose last element is the most recent value. */
WC_API wc_status wc_model_predict_next(const wc_model* model, const double* x, size_t length, const double* const* conds,
                                       size_t n_conds, double* out);
/* Recursive forecast of `steps` values. Network conditions are held at their
 * last value; AR feeds every feature back. */
WC_API wc_status wc_model_forecast(const wc_model* model, const double* x, size_t length, const double* const* conds,
                                   size_t n_conds, size_t steps, double* out);

/* ---- training ----------------------------------------------------------- */

typedef struct wc_train_result wc_train_result;

/* Trains seed_pool networks and keeps the selected ones (best first). */
WC_API wc_status wc_train_ensemble(const wc_network_config* net, const wc_train_config* train, const double* x,
                                   size_t length, const double* const* conds, size_t n_conds, wc_train_result** out);
/* A single run from init with `seed`; the result holds one report even if it diverged. */
WC_API wc_status wc_train_single(const wc_network_config* net, const wc_train_config* train, const double* x,
                                 size_t length, const double* const* conds, size_t n_conds, uint64_t seed,
                                 wc_train_result** out);
WC_API void wc_train_result_free(wc_train_result* result);

WC_API size_t wc_train_result_count(const wc_train_result* result);
WC_API uint64_t wc_train_result_seed(const wc_train_result* result, size_t index);
WC_API double wc_train_result_train_mae(const wc_train_result* result, size_t index);
WC_API double wc_train_result_initial_mae(const wc_train_result* result, size_t index);
WC_API int wc_train_result_diverged(const wc_train_result* result, size_t index);
/* Loss before each update; *length is the number of completed iterations. */
WC_API const double* wc_train_result_loss_trace(const wc_train_result* result, size_t index, size_t* length);
WC_API wc_status wc_train_result_trace_csv(const wc_train_result* result, size_t index, char** out);
/* New model holding the trained parameters; info carries seed and train MAE. */
WC_API wc_status wc_train_result_model(const wc_train_result* result, size_t index, wc_model** out);

/* ---- metrics ------------------------------------------------------------ */

WC_API wc_status wc_rmse(const double* forecasts, const double* actuals, size_t n, double* out);
WC_API wc_status wc_mase(const double* forecasts, const double* actuals, const double* naive, size_t n, double* out);
WC_API wc_status wc_hits(const double* forecasts, const double* actuals, size_t n, double* out);
/* Mean and population standard deviation. */
WC_API wc_status wc_summarize(const double* values, size_t n, double* mean, double* std);

typedef struct wc_metrics wc_metrics;

WC_API wc_status wc_metrics_create(wc_metrics** out);
WC_API void wc_metrics_free(wc_metrics* metrics);
/* One labelled row from per-seed values (n_seeds of each). */
WC_API wc_status wc_metrics_add_row(wc_metrics* metrics, const char* label, const double* rmse, const double* mase,
                                    const double* hits, size_t n_seeds, size_t n_points);
WC_API size_t wc_metrics_row_count(const wc_metrics* metrics);
/* metric is "rmse", "mase" or "hits". */
WC_API wc_status wc_metrics_row_mean(const wc_metrics* metrics, size_t row, const char* metric, double* mean,
                                     double* std);
/* label,metric,mean,std,n_seeds,n_points,values */
WC_API wc_status wc_metrics_csv(const wc_metrics* metrics, char** out);
WC_API wc_status wc_metrics_table(const wc_metrics* metrics, const char* title, const char* scale, char** out);

/* Shortest decimal text that reads back to the same double. */
WC_API wc_status wc_format_double(double value, char* buffer, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
