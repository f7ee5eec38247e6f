/* Exercises the C interface from C: presets, simulation, solving, charts,
 * monitoring, evaluation, detectability and the error contract. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "owma/owma.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

#define OK(call)                                                     \
  do {                                                               \
    owma_status s_ = (call);                                         \
    if (s_ != OWMA_OK) {                                             \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #call, \
              owma_status_string(s_), owma_last_error());            \
      exit(1);                                                       \
    }                                                                \
  } while (0)

static void join(char* out, size_t n, const char* dir, const char* file) { snprintf(out, n, "%s/%s", dir, file); }

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_out";
  char path[1024];

  CHECK(owma_preset_count() == 5);
  CHECK(strcmp(owma_preset_name(0), "num-gaussian") == 0);
  CHECK(owma_preset_name(99) == NULL);

  owma_config* bad = NULL;
  CHECK(owma_config_from_preset("missing", &bad) == OWMA_ERR_UNKNOWN_PRESET);
  CHECK(bad == NULL);
  CHECK(strstr(owma_last_error(), "num-gaussian") != NULL);
  CHECK(owma_config_from_text("[nonsense]\nx = 1\n", &bad) == OWMA_ERR_CONFIG);
  CHECK(owma_config_from_preset(NULL, &bad) == OWMA_ERR_INVALID_ARGUMENT);

  owma_config* cfg = NULL;
  OK(owma_config_from_preset("num-gaussian", &cfg));
  CHECK(strcmp(owma_config_name(cfg), "num-gaussian") == 0);
  CHECK(owma_config_dim(cfg) == 4);
  double xi[4];
  OK(owma_config_fault_direction(cfg, xi, 4));
  OK(owma_simulate(cfg, 11, dir));

  owma_training* training = NULL;
  join(path, sizeof path, dir, "training.csv");
  OK(owma_training_load(path, &training));
  int n = 0, w = 0, p = 0;
  OK(owma_training_shape(training, &n, &w, &p));
  CHECK(n == 5000 && w == 10 && p == 4);

  owma_solver_options opts;
  owma_solver_options_init(&opts);
  owma_weights* weights = NULL;
  OK(owma_weights_solve(training, xi, 4, 10, &opts, &weights));
  owma_solver_summary sum;
  OK(owma_weights_summary(weights, &sum));
  CHECK(sum.window == 10 && sum.converged && sum.residual <= 1e-10);
  CHECK(strcmp(sum.second_order, "violated") != 0);
  double a[10];
  OK(owma_weights_values(weights, a, 10));
  double total = 0.0;
  for (int i = 0; i < 10; ++i) total += a[i];
  CHECK(fabs(total - 1.0) < 1e-12);
  CHECK(owma_weights_values(weights, a, 3) == OWMA_ERR_INVALID_ARGUMENT);
  owma_weights* too_long = NULL;
  CHECK(owma_weights_solve(training, xi, 4, 11, &opts, &too_long) == OWMA_ERR_INVALID_ARGUMENT);
  CHECK(too_long == NULL);

  join(path, sizeof path, dir, "weights.txt");
  OK(owma_weights_save(weights, path));
  owma_weights* reloaded = NULL;
  OK(owma_weights_load(path, &reloaded));
  double b[10];
  OK(owma_weights_values(reloaded, b, 10));
  for (int i = 0; i < 10; ++i) CHECK(a[i] == b[i]);

  owma_chart* chart = NULL;
  OK(owma_chart_train(training, weights, 0.01, "F", 0.0, &chart));
  CHECK(owma_chart_window(chart) == 10 && owma_chart_dim(chart) == 4);
  CHECK(owma_chart_limit(chart) > 13.0 && owma_chart_limit(chart) < 14.0);
  owma_chart* bad_chart = NULL;
  CHECK(owma_chart_train(training, weights, 0.01, "median", 0.0, &bad_chart) != OWMA_OK);

  join(path, sizeof path, dir, "chart.txt");
  OK(owma_chart_save(chart, path));
  owma_chart* chart2 = NULL;
  OK(owma_chart_load(path, &chart2));
  CHECK(owma_chart_limit(chart2) == owma_chart_limit(chart));

  owma_series* test = NULL;
  join(path, sizeof path, dir, "test.csv");
  OK(owma_series_load(path, &test));
  CHECK(owma_series_length(test) == 800 && owma_series_dim(test) == 4);

  owma_stats* stats = NULL;
  OK(owma_monitor(chart2, test, &stats));
  CHECK(owma_stats_length(stats) == 791);

  owma_schedule* schedule = NULL;
  join(path, sizeof path, dir, "schedule.csv");
  OK(owma_schedule_load(path, &schedule));
  CHECK(owma_schedule_size(schedule) > 0);

  owma_metrics* metrics = NULL;
  OK(owma_evaluate(stats, schedule, 400, 10, &metrics));
  owma_metrics_summary ms;
  OK(owma_metrics_summary_get(metrics, &ms));
  CHECK(ms.episodes == owma_schedule_size(schedule));
  CHECK(ms.far >= 0.0 && ms.far <= 0.1);
  join(path, sizeof path, dir, "metrics.txt");
  OK(owma_metrics_save(metrics, path));

  owma_fault_profile prof = {xi, 4, 0.42, 15, 20, 0};
  owma_verdict v;
  OK(owma_detectability(chart, &prof, &v));
  CHECK(v.w_sharp == 15);
  CHECK(v.g_detectable == v.guaranteed);
  prof.tau_o_lb = 0;
  CHECK(owma_detectability(chart, &prof, &v) == OWMA_ERR_INVALID_ARGUMENT);

  /* Rank-deficient data reports a numerical failure. */
  join(path, sizeof path, dir, "flat.csv");
  FILE* f = fopen(path, "w");
  fprintf(f, "set,j,x1,x2\n");
  for (int i = 1; i <= 30; ++i)
    for (int j = 2; j >= 1; --j) fprintf(f, "%d,%d,%d,%d\n", i, j, 3 * i + j, 3 * i + j);
  fclose(f);
  owma_training* flat = NULL;
  OK(owma_training_load(path, &flat));
  double e1[2] = {1.0, 0.0};
  owma_weights* flat_w = NULL;
  const owma_status fs = owma_weights_solve(flat, e1, 2, 2, &opts, &flat_w);
  CHECK(owma_status_is_numerical(fs));
  CHECK(flat_w == NULL);

  CHECK(owma_training_load("/nonexistent/training.csv", &flat) == OWMA_ERR_IO);

  owma_config_free(NULL);
  owma_metrics_free(metrics);
  owma_schedule_free(schedule);
  owma_stats_free(stats);
  owma_series_free(test);
  owma_chart_free(chart2);
  owma_chart_free(chart);
  owma_weights_free(reloaded);
  owma_weights_free(weights);
  owma_training_free(flat);
  owma_training_free(training);
  owma_config_free(cfg);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
