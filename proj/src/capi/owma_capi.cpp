#include "owma/owma.h"

#include <exception>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "core/config.hpp"
#include "core/detectability.hpp"
#include "core/detection.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/io.hpp"
#include "core/simulators.hpp"
#include "core/weight_solver.hpp"

struct owma_config {
  owma::ExperimentConfig config;
  std::string text;
  std::string overrides;
};

struct owma_training {
  owma::TrainingSet training;
};

struct owma_series {
  owma::ObservationSeries series;
};

struct owma_schedule {
  owma::FaultSchedule schedule;
};

struct owma_weights {
  Eigen::VectorXd values;
  std::optional<owma::SolverReport> report;
  double ridge = 0.0;
};

struct owma_chart {
  owma::ControlChart chart;
};

struct owma_stats {
  owma::StatisticSeries stats;
};

struct owma_metrics {
  owma::DetectionMetrics metrics;
};

namespace {

thread_local std::string last_error;

owma_status to_status(owma::ErrorCode code) {
  using owma::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return OWMA_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return OWMA_ERR_PARSE;
    case ErrorCode::io: return OWMA_ERR_IO;
    case ErrorCode::config: return OWMA_ERR_CONFIG;
    case ErrorCode::not_positive_definite: return OWMA_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::singular: return OWMA_ERR_SINGULAR;
    case ErrorCode::not_converged: return OWMA_ERR_NOT_CONVERGED;
    case ErrorCode::diverged: return OWMA_ERR_DIVERGED;
    case ErrorCode::unknown_preset: return OWMA_ERR_UNKNOWN_PRESET;
  }
  return OWMA_ERR_INTERNAL;
}

template <class F>
owma_status guard(F&& body) {
  try {
    last_error.clear();
    body();
    return OWMA_OK;
  } catch (const owma::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return OWMA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return OWMA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw owma::Error(owma::ErrorCode::invalid_argument, std::string(what) + " is null");
}

Eigen::VectorXd vector_of(const double* values, int n, const char* what) {
  need(values, what);
  if (n <= 0) throw owma::Error(owma::ErrorCode::invalid_argument, std::string(what) + " must not be empty");
  return Eigen::Map<const Eigen::VectorXd>(values, n);
}

owma::FaultProfile profile_of(const owma_fault_profile* p) {
  need(p, "fault profile");
  owma::FaultProfile profile{owma::UnitDirection(vector_of(p->xi, p->p, "fault direction")), p->f_lb, p->tau_o_lb,
                             p->tau_r_lb, p->tau_r_prev_lb > 0 ? p->tau_r_prev_lb : p->tau_r_lb};
  owma::validate(profile);
  return profile;
}

owma::SolverConfig solver_of(const owma_solver_options* o) {
  owma::SolverConfig c;
  if (o == nullptr) return c;
  if (o->tol > 0) c.tol = o->tol;
  if (o->max_iter > 0) c.max_iter = o->max_iter;
  c.multi_start = o->multi_start != 0;
  c.seed = o->seed;
  return c;
}

owma_status make_config(owma::ExperimentConfig config, std::string text, owma_config** out) {
  return guard([&] {
    need(out, "output handle");
    *out = new owma_config{std::move(config), std::move(text), {}};
  });
}

template <class T, class Load>
owma_status load_into(const char* path, T** out, Load load) {
  return guard([&] {
    need(path, "path");
    need(out, "output handle");
    *out = new T{load(std::filesystem::path(path))};
  });
}

void save_text(const char* path, const std::ostringstream& os) {
  need(path, "path");
  owma::io::write_text(path, os.str());
}

}  // namespace

extern "C" {

const char* owma_version(void) { return "1.0.0"; }

const char* owma_status_string(owma_status status) {
  switch (status) {
    case OWMA_OK: return "ok";
    case OWMA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OWMA_ERR_PARSE: return "parse error";
    case OWMA_ERR_IO: return "i/o error";
    case OWMA_ERR_CONFIG: return "configuration error";
    case OWMA_ERR_NOT_POSITIVE_DEFINITE: return "covariance not positive definite";
    case OWMA_ERR_SINGULAR: return "singular system";
    case OWMA_ERR_NOT_CONVERGED: return "not converged";
    case OWMA_ERR_DIVERGED: return "diverged";
    case OWMA_ERR_UNKNOWN_PRESET: return "unknown preset";
    case OWMA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* owma_last_error(void) { return last_error.c_str(); }

int owma_status_is_numerical(owma_status status) {
  return status == OWMA_ERR_NOT_POSITIVE_DEFINITE || status == OWMA_ERR_SINGULAR ||
         status == OWMA_ERR_NOT_CONVERGED || status == OWMA_ERR_DIVERGED;
}

size_t owma_preset_count(void) { return owma::embedded_presets().size(); }

const char* owma_preset_name(size_t index) {
  const auto& presets = owma::embedded_presets();
  return index < presets.size() ? presets[index].first.c_str() : nullptr;
}

owma_status owma_config_from_preset(const char* name, owma_config** out) {
  std::optional<owma::ExperimentConfig> config;
  std::string text;
  const owma_status s = guard([&] {
    need(name, "preset name");
    text = owma::preset_text(name);
    config = owma::preset(name);
  });
  return s == OWMA_OK ? make_config(std::move(*config), std::move(text), out) : s;
}

owma_status owma_config_from_file(const char* path, owma_config** out) {
  std::optional<owma::ExperimentConfig> config;
  std::string text;
  const owma_status s = guard([&] {
    need(path, "path");
    text = owma::io::read_text(path);
    config = owma::parse_config(text, path);
  });
  return s == OWMA_OK ? make_config(std::move(*config), std::move(text), out) : s;
}

owma_status owma_config_from_text(const char* text, owma_config** out) {
  std::optional<owma::ExperimentConfig> config;
  const owma_status s = guard([&] {
    need(text, "config text");
    config = owma::parse_config(text);
  });
  return s == OWMA_OK ? make_config(std::move(*config), text, out) : s;
}

void owma_config_free(owma_config* config) { delete config; }

owma_status owma_config_set_seed(owma_config* config, uint64_t seed) {
  return guard([&] {
    need(config, "config");
    config->config.replication.seed = seed;
    config->overrides += "; override: seed = " + std::to_string(seed) + "\n";
  });
}

owma_status owma_config_set_count(owma_config* config, int count) {
  return guard([&] {
    need(config, "config");
    owma::require(count > 0, "replication count must be positive");
    config->config.replication.count = count;
    config->overrides += "; override: count = " + std::to_string(count) + "\n";
  });
}

owma_status owma_config_set_threads(owma_config* config, int threads) {
  return guard([&] {
    need(config, "config");
    owma::require(threads >= 0, "thread count must not be negative");
    config->config.replication.threads = threads;
  });
}

owma_status owma_config_set_ridge(owma_config* config, double ridge) {
  return guard([&] {
    need(config, "config");
    owma::require(ridge >= 0.0, "ridge must not be negative");
    config->config.ridge = ridge;
    config->overrides += "; override: ridge = " + owma::io::format_double(ridge) + "\n";
  });
}

const char* owma_config_name(const owma_config* config) { return config ? config->config.name.c_str() : ""; }

int owma_config_dim(const owma_config* config) {
  return config ? static_cast<int>(config->config.fault.xi.size()) : 0;
}

owma_status owma_config_fault_direction(const owma_config* config, double* xi, int p) {
  return guard([&] {
    need(config, "config");
    need(xi, "output buffer");
    const Eigen::VectorXd& v = config->config.fault.xi;
    owma::require(p == v.size(), "buffer length does not match the fault direction");
    for (int i = 0; i < p; ++i) xi[i] = v[i];
  });
}

owma_status owma_simulate(const owma_config* config, uint64_t seed, const char* out_dir) {
  return guard([&] {
    need(config, "config");
    need(out_dir, "output directory");
    const std::filesystem::path dir(out_dir);
    const owma::SimulatedData data = owma::simulate_experiment(config->config, seed);
    std::ostringstream training;
    owma::io::write_training(training, data.training);
    owma::io::write_text(dir / "training.csv", training.str());
    std::ostringstream test;
    owma::io::write_observations(test, data.test);
    owma::io::write_text(dir / "test.csv", test.str());
    std::ostringstream schedule;
    owma::io::write_schedule(schedule, data.schedule);
    owma::io::write_text(dir / "schedule.csv", schedule.str());
    if (data.baseline.length() > 0) {
      std::ostringstream baseline;
      owma::io::write_observations(baseline, data.baseline);
      owma::io::write_text(dir / "baseline.csv", baseline.str());
    }
  });
}

owma_status owma_reproduce(const owma_config* config, const char* out_dir) {
  return guard([&] {
    need(config, "config");
    need(out_dir, "output directory");
    const auto results = owma::run_experiment(config->config);
    owma::write_experiment(out_dir, config->config, config->text + config->overrides, results);
  });
}

owma_status owma_training_load(const char* path, owma_training** out) {
  return load_into(path, out, owma::io::load_training);
}

void owma_training_free(owma_training* training) { delete training; }

owma_status owma_training_shape(const owma_training* training, int* n_sets, int* window, int* dim) {
  return guard([&] {
    need(training, "training");
    if (n_sets) *n_sets = training->training.N();
    if (window) *window = training->training.W();
    if (dim) *dim = training->training.p();
  });
}

owma_status owma_series_load(const char* path, owma_series** out) {
  return load_into(path, out, owma::io::load_observations);
}

void owma_series_free(owma_series* series) { delete series; }

int64_t owma_series_length(const owma_series* series) { return series ? series->series.length() : 0; }

int owma_series_dim(const owma_series* series) { return series ? static_cast<int>(series->series.dim()) : 0; }

owma_status owma_schedule_load(const char* path, owma_schedule** out) {
  return load_into(path, out, owma::io::load_schedule);
}

void owma_schedule_free(owma_schedule* schedule) { delete schedule; }

int owma_schedule_size(const owma_schedule* schedule) {
  return schedule ? static_cast<int>(schedule->schedule.size()) : 0;
}

void owma_solver_options_init(owma_solver_options* options) {
  if (options != nullptr) *options = owma_solver_options{0.0, 0, 0, 0, 0.0};
}

owma_status owma_weights_solve(const owma_training* training, const double* xi, int p, int window,
                               const owma_solver_options* options, owma_weights** out) {
  return guard([&] {
    need(training, "training");
    need(out, "output handle");
    owma::require(window >= 1 && window <= training->training.W(),
                  "window must lie between 1 and the training set length " + std::to_string(training->training.W()));
    const owma::UnitDirection dir(vector_of(xi, p, "fault direction"));
    owma::require(dir.dim() == training->training.p(), "fault direction length does not match the training data");
    const double ridge = options ? options->ridge : 0.0;
    const owma::AutocovarianceTable table =
        owma::estimate_autocovariance(training->training.leading(window)).with_ridge(ridge);
    owma::SolverReport report = owma::solve_weights(table, dir, window, solver_of(options));
    auto* w = new owma_weights{report.weight, std::move(report), ridge};
    *out = w;
  });
}

owma_status owma_weights_load(const char* path, owma_weights** out) {
  return guard([&] {
    need(path, "path");
    need(out, "output handle");
    *out = new owma_weights{owma::io::load_weights(path), std::nullopt, 0.0};
  });
}

owma_status owma_weights_uniform(int window, owma_weights** out) {
  return guard([&] {
    need(out, "output handle");
    *out = new owma_weights{owma::WeightVector::uniform(window).vec(), std::nullopt, 0.0};
  });
}

void owma_weights_free(owma_weights* weights) { delete weights; }

owma_status owma_weights_save(const owma_weights* weights, const char* path) {
  return guard([&] {
    need(weights, "weights");
    std::ostringstream os;
    if (weights->report)
      owma::io::write_weights(os, *weights->report, weights->ridge);
    else
      owma::io::write_weights(os, weights->values);
    save_text(path, os);
  });
}

owma_status owma_weights_summary(const owma_weights* weights, owma_solver_summary* out) {
  return guard([&] {
    need(weights, "weights");
    need(out, "output");
    *out = owma_solver_summary{};
    out->window = static_cast<int>(weights->values.size());
    out->max_abs_weight = weights->values.cwiseAbs().maxCoeff();
    out->second_order = "";
    if (!weights->report) return;
    const owma::SolverReport& r = *weights->report;
    out->converged = r.converged;
    out->iterations = r.iterations;
    out->damped = r.damped;
    out->starts = r.starts;
    out->residual = r.residual;
    out->beta = r.beta;
    out->lagrange_multiplier = r.lagrange_multiplier;
    out->symmetry_defect = r.symmetry_defect;
    out->weight_bound = r.weight_bound;
    out->max_abs_weight = r.max_abs_weight;
    out->second_order = owma::to_string(r.second_order);
  });
}

int owma_weights_size(const owma_weights* weights) {
  return weights ? static_cast<int>(weights->values.size()) : 0;
}

owma_status owma_weights_values(const owma_weights* weights, double* values, int size) {
  return guard([&] {
    need(weights, "weights");
    need(values, "output buffer");
    owma::require(size == weights->values.size(), "buffer length does not match the window");
    for (int i = 0; i < size; ++i) values[i] = weights->values[i];
  });
}

owma_status owma_chart_train(const owma_training* training, const owma_weights* weights, double alpha,
                             const char* limit_kind, double ridge, owma_chart** out) {
  return guard([&] {
    need(training, "training");
    need(weights, "weights");
    need(out, "output handle");
    const owma::LimitKind kind = owma::parse_limit_kind(limit_kind ? limit_kind : "F");
    owma::require(weights->values.size() <= training->training.W(),
                  "window exceeds the training set length " + std::to_string(training->training.W()));
    *out = new owma_chart{
        owma::train_chart(training->training, owma::WeightVector(weights->values), alpha, kind, ridge)};
  });
}

owma_status owma_chart_load(const char* path, owma_chart** out) {
  return load_into(path, out, owma::io::load_chart);
}

void owma_chart_free(owma_chart* chart) { delete chart; }

owma_status owma_chart_save(const owma_chart* chart, const char* path) {
  return guard([&] {
    need(chart, "chart");
    std::ostringstream os;
    owma::io::write_chart(os, chart->chart);
    save_text(path, os);
  });
}

double owma_chart_limit(const owma_chart* chart) { return chart ? chart->chart.limit() : 0.0; }

int owma_chart_window(const owma_chart* chart) { return chart ? chart->chart.W() : 0; }

int owma_chart_dim(const owma_chart* chart) { return chart ? chart->chart.p() : 0; }

owma_status owma_monitor(const owma_chart* chart, const owma_series* series, owma_stats** out) {
  return guard([&] {
    need(chart, "chart");
    need(series, "series");
    need(out, "output handle");
    *out = new owma_stats{owma::monitor(series->series, chart->chart)};
  });
}

owma_status owma_stats_load(const char* path, owma_stats** out) {
  return load_into(path, out, owma::io::load_statistics);
}

void owma_stats_free(owma_stats* stats) { delete stats; }

owma_status owma_stats_save(const owma_stats* stats, const char* path) {
  return guard([&] {
    need(stats, "statistics");
    std::ostringstream os;
    owma::io::write_statistics(os, stats->stats);
    save_text(path, os);
  });
}

int64_t owma_stats_length(const owma_stats* stats) {
  return stats ? static_cast<int64_t>(stats->stats.t.size()) : 0;
}

owma_status owma_evaluate(const owma_stats* stats, const owma_schedule* schedule, int64_t fault_free_end, int window,
                          owma_metrics** out) {
  return guard([&] {
    need(stats, "statistics");
    need(schedule, "schedule");
    need(out, "output handle");
    *out = new owma_metrics{owma::evaluate(stats->stats, schedule->schedule, fault_free_end, window)};
  });
}

void owma_metrics_free(owma_metrics* metrics) { delete metrics; }

owma_status owma_metrics_save(const owma_metrics* metrics, const char* path) {
  return guard([&] {
    need(metrics, "metrics");
    std::ostringstream os;
    owma::io::write_metrics(os, metrics->metrics);
    save_text(path, os);
  });
}

owma_status owma_metrics_summary_get(const owma_metrics* metrics, owma_metrics_summary* out) {
  return guard([&] {
    need(metrics, "metrics");
    need(out, "output");
    const owma::DetectionMetrics& m = metrics->metrics;
    *out = owma_metrics_summary{};
    out->far = m.far;
    out->active_alarm_rate = m.active_alarm_rate;
    out->missed_alarms = m.missed_alarms;
    out->region_missed_alarms = m.region_missed_alarms;
    out->episodes = static_cast<int>(m.episodes.size());
    for (const auto& e : m.episodes) {
      out->appearances_detected += e.appearance_detected ? 1 : 0;
      out->disappearances_detected += e.disappearance_detected ? 1 : 0;
    }
    out->missed_transitions = m.missed_transitions;
    out->mean_detection_delay = m.mean_detection_delay;
  });
}

owma_status owma_detectability(const owma_chart* chart, const owma_fault_profile* profile, owma_verdict* out) {
  return guard([&] {
    need(chart, "chart");
    need(out, "output");
    const owma::DetectabilityVerdict v = owma::verdict(profile_of(profile), chart->chart);
    *out = owma_verdict{v.ap_detectable, v.dp_detectable, v.g_detectable, v.guaranteed, v.margin, v.w_sharp};
  });
}

owma_status owma_select_window(const owma_training* training, const owma_fault_profile* profile, double alpha,
                               const owma_solver_options* options, const char* table_path, int* w_star,
                               int* w_sharp) {
  return guard([&] {
    need(training, "training");
    const owma::FaultProfile fp = profile_of(profile);
    const int sharp = owma::max_window(fp);
    owma::require(training->training.W() >= sharp, "training sets hold " + std::to_string(training->training.W()) +
                                                        " positions but window selection needs " +
                                                        std::to_string(sharp));
    const double ridge = options ? options->ridge : 0.0;
    const owma::AutocovarianceTable table =
        owma::estimate_autocovariance(training->training.leading(sharp)).with_ridge(ridge);
    const owma::WindowSelection sel = owma::select_window(fp, table, alpha, training->training.N(), solver_of(options));
    if (table_path != nullptr) {
      std::ostringstream os;
      os << "W,beta,margin,converged\n";
      for (std::size_t i = 0; i < sel.windows.size(); ++i) {
        os << sel.windows[i] << ',' << owma::io::format_double(sel.beta[i]) << ','
           << owma::io::format_double(sel.margin[i]) << ',' << int(sel.converged[i]) << '\n';
      }
      save_text(table_path, os);
    }
    if (w_star) *w_star = sel.w_star.value_or(0);
    if (w_sharp) *w_sharp = sel.w_sharp;
  });
}

}  // extern "C"
