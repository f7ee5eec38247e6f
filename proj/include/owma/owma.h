#ifndef OWMA_OWMA_H
#define OWMA_OWMA_H

/* C interface to the optimally weighted moving average T^2 library.
 *
 * Every function returns an owma_status. On failure the message of the most
 * recent error on the calling thread is available from owma_last_error().
 * Handles are opaque and released with the matching *_free function; passing
 * NULL to a *_free function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OWMA_BUILDING_LIBRARY)
#    define OWMA_API __declspec(dllexport)
#  else
#    define OWMA_API __declspec(dllimport)
#  endif
#else
#  define OWMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum owma_status {
  OWMA_OK = 0,
  OWMA_ERR_INVALID_ARGUMENT = 1,
  OWMA_ERR_PARSE = 2,
  OWMA_ERR_IO = 3,
  OWMA_ERR_CONFIG = 4,
  OWMA_ERR_NOT_POSITIVE_DEFINITE = 5,
  OWMA_ERR_SINGULAR = 6,
  OWMA_ERR_NOT_CONVERGED = 7,
  OWMA_ERR_DIVERGED = 8,
  OWMA_ERR_UNKNOWN_PRESET = 9,
  OWMA_ERR_INTERNAL = 99
} owma_status;

typedef struct owma_config owma_config;
typedef struct owma_training owma_training;
typedef struct owma_series owma_series;
typedef struct owma_schedule owma_schedule;
typedef struct owma_weights owma_weights;
typedef struct owma_chart owma_chart;
typedef struct owma_stats owma_stats;
typedef struct owma_metrics owma_metrics;

OWMA_API const char* owma_version(void);
OWMA_API const char* owma_status_string(owma_status status);
/* Message of the last failure on this thread; empty when none. */
OWMA_API const char* owma_last_error(void);
/* Nonzero for failures caused by the data rather than the input files. */
OWMA_API int owma_status_is_numerical(owma_status status);

/* ---- presets and configuration ---- */

OWMA_API size_t owma_preset_count(void);
OWMA_API const char* owma_preset_name(size_t index);

OWMA_API owma_status owma_config_from_preset(const char* name, owma_config** out);
OWMA_API owma_status owma_config_from_file(const char* path, owma_config** out);
OWMA_API owma_status owma_config_from_text(const char* text, owma_config** out);
OWMA_API void owma_config_free(owma_config* config);
OWMA_API owma_status owma_config_set_seed(owma_config* config, uint64_t seed);
OWMA_API owma_status owma_config_set_count(owma_config* config, int count);
OWMA_API owma_status owma_config_set_threads(owma_config* config, int threads);
OWMA_API owma_status owma_config_set_ridge(owma_config* config, double ridge);
OWMA_API const char* owma_config_name(const owma_config* config);
/* Fault direction length, i.e. the observation dimension. */
OWMA_API int owma_config_dim(const owma_config* config);
OWMA_API owma_status owma_config_fault_direction(const owma_config* config, double* xi, int p);

/* Writes training.csv, test.csv, schedule.csv and, when a PCA baseline is
 * configured, baseline.csv into out_dir for one seed. */
OWMA_API owma_status owma_simulate(const owma_config* config, uint64_t seed, const char* out_dir);

/* Runs every replication of the configuration and writes per-seed CSVs,
 * summary.csv and summary_mean.csv into out_dir. */
OWMA_API owma_status owma_reproduce(const owma_config* config, const char* out_dir);

/* ---- data files ---- */

OWMA_API owma_status owma_training_load(const char* path, owma_training** out);
OWMA_API void owma_training_free(owma_training* training);
OWMA_API owma_status owma_training_shape(const owma_training* training, int* n_sets, int* window, int* dim);

OWMA_API owma_status owma_series_load(const char* path, owma_series** out);
OWMA_API void owma_series_free(owma_series* series);
OWMA_API int64_t owma_series_length(const owma_series* series);
OWMA_API int owma_series_dim(const owma_series* series);

OWMA_API owma_status owma_schedule_load(const char* path, owma_schedule** out);
OWMA_API void owma_schedule_free(owma_schedule* schedule);
OWMA_API int owma_schedule_size(const owma_schedule* schedule);

/* ---- weights ---- */

typedef struct owma_solver_options {
  double tol;          /* <= 0 selects the default */
  int max_iter;        /* <= 0 selects the default */
  int multi_start;
  uint64_t seed;
  double ridge;        /* added to the diagonal autocovariance blocks */
} owma_solver_options;

OWMA_API void owma_solver_options_init(owma_solver_options* options);

/* Optimal weights of window W for direction xi (length p) from the first W
 * positions of every training set. */
OWMA_API owma_status owma_weights_solve(const owma_training* training, const double* xi, int p, int window,
                                        const owma_solver_options* options, owma_weights** out);
/* Reads a weight file; the values are taken as given and the report fields are empty. */
OWMA_API owma_status owma_weights_load(const char* path, owma_weights** out);
OWMA_API owma_status owma_weights_uniform(int window, owma_weights** out);
OWMA_API void owma_weights_free(owma_weights* weights);
OWMA_API owma_status owma_weights_save(const owma_weights* weights, const char* path);

typedef struct owma_solver_summary {
  int window;
  int converged;
  int iterations;
  int damped;
  int starts;
  double residual;
  double beta;
  double lagrange_multiplier;
  double symmetry_defect;
  double weight_bound;
  double max_abs_weight;
  const char* second_order; /* "strict", "weak", "violated" or "" */
} owma_solver_summary;

OWMA_API owma_status owma_weights_summary(const owma_weights* weights, owma_solver_summary* out);
OWMA_API int owma_weights_size(const owma_weights* weights);
OWMA_API owma_status owma_weights_values(const owma_weights* weights, double* values, int size);

/* ---- charts, monitoring and evaluation ---- */

/* limit_kind is "F", "empirical" or "kde". */
OWMA_API owma_status owma_chart_train(const owma_training* training, const owma_weights* weights, double alpha,
                                      const char* limit_kind, double ridge, owma_chart** out);
OWMA_API owma_status owma_chart_load(const char* path, owma_chart** out);
OWMA_API void owma_chart_free(owma_chart* chart);
OWMA_API owma_status owma_chart_save(const owma_chart* chart, const char* path);
OWMA_API double owma_chart_limit(const owma_chart* chart);
OWMA_API int owma_chart_window(const owma_chart* chart);
OWMA_API int owma_chart_dim(const owma_chart* chart);

OWMA_API owma_status owma_monitor(const owma_chart* chart, const owma_series* series, owma_stats** out);
OWMA_API owma_status owma_stats_load(const char* path, owma_stats** out);
OWMA_API void owma_stats_free(owma_stats* stats);
OWMA_API owma_status owma_stats_save(const owma_stats* stats, const char* path);
OWMA_API int64_t owma_stats_length(const owma_stats* stats);

/* window is the number of observations each statistic spans. */
OWMA_API owma_status owma_evaluate(const owma_stats* stats, const owma_schedule* schedule, int64_t fault_free_end,
                                   int window, owma_metrics** out);
OWMA_API void owma_metrics_free(owma_metrics* metrics);
OWMA_API owma_status owma_metrics_save(const owma_metrics* metrics, const char* path);

typedef struct owma_metrics_summary {
  double far;
  double active_alarm_rate;
  int64_t missed_alarms;
  int64_t region_missed_alarms;
  int episodes;
  int appearances_detected;
  int disappearances_detected;
  int missed_transitions;
  double mean_detection_delay;
} owma_metrics_summary;

OWMA_API owma_status owma_metrics_summary_get(const owma_metrics* metrics, owma_metrics_summary* out);

/* ---- detectability ---- */

typedef struct owma_fault_profile {
  const double* xi;
  int p;
  double f_lb;
  int tau_o_lb;
  int tau_r_lb;
  int tau_r_prev_lb; /* <= 0 selects tau_r_lb */
} owma_fault_profile;

typedef struct owma_verdict {
  int ap_detectable;
  int dp_detectable;
  int g_detectable;
  int guaranteed;
  double margin;
  int w_sharp;
} owma_verdict;

OWMA_API owma_status owma_detectability(const owma_chart* chart, const owma_fault_profile* profile,
                                        owma_verdict* out);

/* Solves the optimal weights for every W up to the sharp bound using the
 * training sets (which must hold at least that many positions) and writes a
 * W,beta,margin,converged table to table_path when it is not NULL.
 * *w_star is 0 when no window guarantees detection. */
OWMA_API owma_status owma_select_window(const owma_training* training, const owma_fault_profile* profile,
                                        double alpha, const owma_solver_options* options, const char* table_path,
                                        int* w_star, int* w_sharp);

#ifdef __cplusplus
}
#endif

#endif
