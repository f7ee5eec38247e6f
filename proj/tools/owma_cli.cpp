// owma: command line front end over the C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "owma/owma.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

struct Failure {
  int code;
};

void check(owma_status s, const std::string& context) {
  if (s == OWMA_OK) return;
  std::cerr << "owma: " << context << ": " << owma_last_error() << " (" << owma_status_string(s) << ")\n";
  throw Failure{owma_status_is_numerical(s) ? exit_numerical : exit_usage};
}

[[noreturn]] void usage(const std::string& message) {
  std::cerr << "owma: " << message << '\n';
  throw Failure{exit_usage};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Config = Handle<owma_config, owma_config_free>;
using Training = Handle<owma_training, owma_training_free>;
using Series = Handle<owma_series, owma_series_free>;
using Schedule = Handle<owma_schedule, owma_schedule_free>;
using Weights = Handle<owma_weights, owma_weights_free>;
using Chart = Handle<owma_chart, owma_chart_free>;
using Stats = Handle<owma_stats, owma_stats_free>;
using Metrics = Handle<owma_metrics, owma_metrics_free>;

template <class H, class Load, class... Args>
H load(Load fn, const std::string& what, Args&&... args) {
  typename H::pointer raw = nullptr;
  check(fn(std::forward<Args>(args)..., &raw), what);
  return H(raw);
}

std::string presets_list() {
  std::string s;
  for (size_t i = 0; i < owma_preset_count(); ++i) s += std::string(i ? ", " : "") + owma_preset_name(i);
  return s;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  double ridge = 0.0;
};

Config open_config(const Globals& g, const std::string& preset) {
  Config c;
  if (!g.config.empty()) {
    c = load<Config>(owma_config_from_file, "reading " + g.config, g.config.c_str());
  } else if (!preset.empty()) {
    owma_config* raw = nullptr;
    const owma_status s = owma_config_from_preset(preset.c_str(), &raw);
    if (s == OWMA_ERR_UNKNOWN_PRESET) usage("unknown preset '" + preset + "'; available: " + presets_list());
    check(s, "preset " + preset);
    c.reset(raw);
  } else {
    usage("a preset name or --config <file> is required");
  }
  if (g.seed) check(owma_config_set_seed(c.get(), *g.seed), "seed");
  if (g.ridge > 0.0) check(owma_config_set_ridge(c.get(), g.ridge), "ridge");
  return c;
}

std::vector<double> config_direction(const Globals& g) {
  if (g.config.empty()) return {};
  Config c = open_config(g, "");
  std::vector<double> xi(static_cast<size_t>(owma_config_dim(c.get())));
  check(owma_config_fault_direction(c.get(), xi.data(), static_cast<int>(xi.size())), "fault direction");
  return xi;
}

std::string out_path(const Globals& g, const std::string& fallback) { return g.out.empty() ? fallback : g.out; }

void print_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

// Chart either loaded from a file or trained from a training file and weights.
struct ChartSource {
  std::string chart;
  std::string training;
  std::string weights;
  int window = 0;
  double alpha = 0.01;
  std::string limit = "F";

  void add(CLI::App* cmd) {
    cmd->add_option("--chart", chart, "Chart file written by `owma train`");
    cmd->add_option("--training", training, "Training file");
    cmd->add_option("--weights", weights, "Weight file");
    cmd->add_option("--window", window, "Equal weights of this window when no weight file is given");
    cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--limit", limit, "Control limit: F, empirical or kde");
  }

  Chart build(const Globals& g) const {
    if (!chart.empty()) return load<Chart>(owma_chart_load, "reading " + chart, chart.c_str());
    if (training.empty()) usage("either --chart or --training is required");
    Training t = load<Training>(owma_training_load, "reading " + training, training.c_str());
    Weights w;
    if (!weights.empty()) {
      w = load<Weights>(owma_weights_load, "reading " + weights, weights.c_str());
    } else if (window > 0) {
      w = load<Weights>(owma_weights_uniform, "weights", window);
    } else {
      usage("either --weights or --window is required with --training");
    }
    return load<Chart>(owma_chart_train, "training chart", t.get(), w.get(), alpha, limit.c_str(), g.ridge);
  }
};

struct ProfileArgs {
  std::vector<double> xi;
  double f_lb = 0.0;
  int tau_o = 0;
  int tau_r = 0;
  int tau_r_prev = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--xi", xi, "Fault direction (defaults to the --config fault block)")->delimiter(',');
    cmd->add_option("--f-lb", f_lb, "Lower bound of the fault magnitude");
    cmd->add_option("--tau-o", tau_o, "Lower bound of the active duration");
    cmd->add_option("--tau-r", tau_r, "Lower bound of the inactive duration");
    cmd->add_option("--tau-r-prev", tau_r_prev, "Lower bound of the preceding inactive duration");
  }

  owma_fault_profile get(const Globals& g) {
    if (xi.empty()) xi = config_direction(g);
    if (xi.empty()) usage("--xi or --config is required");
    if (f_lb <= 0.0 || tau_o <= 0 || tau_r <= 0) usage("--f-lb, --tau-o and --tau-r must be positive");
    return owma_fault_profile{xi.data(), static_cast<int>(xi.size()), f_lb, tau_o, tau_r, tau_r_prev};
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Optimally weighted moving average T^2 control charts for intermittent fault detection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(owma_version()));

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides the config)");
  app.add_option("--config", g.config, "Experiment config file");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--ridge", g.ridge, "Ridge added to the diagonal autocovariance blocks")->check(CLI::NonNegativeNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write training, baseline, test and schedule files");
  std::string sim_preset;
  sim->add_option("preset", sim_preset, "Preset name (ignored with --config)");

  // weights
  auto* wts = app.add_subcommand("weights", "Solve optimal weights from a training file");
  std::string w_training;
  std::vector<double> w_xi;
  int w_window = 0;
  int w_min = 1;
  int w_max = 0;
  bool w_independent = false;
  bool w_multi = false;
  wts->add_option("--training", w_training, "Training file")->required();
  wts->add_option("--xi", w_xi, "Fault direction (defaults to the --config fault block)")->delimiter(',');
  auto* w_opt = wts->add_option("--window", w_window, "Single window length");
  auto* wmin_opt = wts->add_option("--min-window", w_min, "First window of a range");
  auto* wmax_opt = wts->add_option("--max-window", w_max, "Last window of a range");
  w_opt->excludes(wmin_opt)->excludes(wmax_opt);
  wts->add_flag("--independent-check", w_independent, "Report the largest deviation from 1/W");
  wts->add_flag("--multi-start", w_multi, "Restart the solver from random feasible points");

  // train
  auto* trn = app.add_subcommand("train", "Train a chart and write it to --out");
  ChartSource t_src;
  t_src.add(trn);

  // monitor
  auto* mon = app.add_subcommand("monitor", "Write t,value,limit,alarm for a test file");
  ChartSource m_src;
  std::string m_test;
  m_src.add(mon);
  mon->add_option("--test", m_test, "Test observations")->required();

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "Score a statistic file against a fault schedule");
  std::string e_stats;
  std::string e_schedule;
  std::int64_t e_ffe = 0;
  int e_window = 1;
  evl->add_option("--statistics", e_stats, "Statistic file")->required();
  evl->add_option("--schedule", e_schedule, "Schedule file")->required();
  evl->add_option("--fault-free-end", e_ffe, "Last time counted for the false alarm rate")->required();
  evl->add_option("--window", e_window, "Observations spanned by one statistic")->check(CLI::PositiveNumber);

  // detectability
  auto* det = app.add_subcommand("detectability", "Guaranteed detectability of a fault profile");
  ChartSource d_src;
  ProfileArgs d_profile;
  bool d_select = false;
  d_src.add(det);
  d_profile.add(det);
  det->add_flag("--select", d_select, "Search the smallest guaranteeing window instead (needs --training)");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Run a named experiment end to end");
  std::string r_name;
  int r_count = 0;
  int r_threads = 0;
  rep->add_option("name", r_name, "Preset name");
  rep->add_option("--count", r_count, "Number of seeds")->check(CLI::PositiveNumber);
  rep->add_option("--threads", r_threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (*sim) {
    Config c = open_config(g, sim_preset);
    const std::uint64_t seed = g.seed.value_or(1);
    const std::string dir = out_path(g, ".");
    check(owma_simulate(c.get(), seed, dir.c_str()), "simulate");
    std::cout << "wrote " << dir << " (" << owma_config_name(c.get()) << ", seed " << seed << ")\n";
  } else if (*wts) {
    Training t = load<Training>(owma_training_load, "reading " + w_training, w_training.c_str());
    int n = 0;
    int set_len = 0;
    int p = 0;
    check(owma_training_shape(t.get(), &n, &set_len, &p), "training");
    if (w_xi.empty()) w_xi = config_direction(g);
    if (w_xi.empty()) usage("--xi or --config is required");
    if (w_window > 0) {
      w_min = w_max = w_window;
    } else if (w_max == 0) {
      w_max = set_len;
    }
    if (w_min < 1 || w_max < w_min || w_max > set_len) usage("window range must lie within 1.." + std::to_string(set_len));
    owma_solver_options opts;
    owma_solver_options_init(&opts);
    opts.multi_start = w_multi;
    opts.seed = g.seed.value_or(0);
    opts.ridge = g.ridge;
    const std::string dir = out_path(g, ".");
    std::cout << "W,beta,symmetry_defect,residual,iterations,converged,damped,second_order,weight_bound,max_abs_weight";
    if (w_independent) std::cout << ",max_dev_uniform";
    std::cout << '\n';
    for (int W = w_min; W <= w_max; ++W) {
      Weights w = load<Weights>(owma_weights_solve, "solving W=" + std::to_string(W), t.get(), w_xi.data(),
                                static_cast<int>(w_xi.size()), W, &opts);
      owma_solver_summary s;
      check(owma_weights_summary(w.get(), &s), "summary");
      const std::string path = (std::filesystem::path(dir) / ("weights_W" + std::to_string(W) + ".txt")).string();
      check(owma_weights_save(w.get(), path.c_str()), "writing " + path);
      std::printf("%d,%.10g,%.6g,%.3g,%d,%d,%d,%s,%.6g,%.6g", W, s.beta, s.symmetry_defect, s.residual, s.iterations,
                  s.converged, s.damped, s.second_order, s.weight_bound, s.max_abs_weight);
      if (w_independent) {
        std::vector<double> a(static_cast<size_t>(W));
        check(owma_weights_values(w.get(), a.data(), W), "weights");
        double dev = 0.0;
        for (double v : a) dev = std::max(dev, std::abs(v - 1.0 / W));
        std::printf(",%.6g", dev);
      }
      std::printf("\n");
    }
  } else if (*trn) {
    if (g.out.empty()) usage("--out <chart file> is required");
    Chart c = t_src.build(g);
    check(owma_chart_save(c.get(), g.out.c_str()), "writing " + g.out);
    std::printf("W=%d p=%d limit=%.10g\n", owma_chart_window(c.get()), owma_chart_dim(c.get()),
                owma_chart_limit(c.get()));
  } else if (*mon) {
    Chart c = m_src.build(g);
    Series s = load<Series>(owma_series_load, "reading " + m_test, m_test.c_str());
    Stats st = load<Stats>(owma_monitor, "monitoring", c.get(), s.get());
    const std::string path = out_path(g, "statistics.csv");
    check(owma_stats_save(st.get(), path.c_str()), "writing " + path);
    std::cout << "wrote " << owma_stats_length(st.get()) << " statistics to " << path << '\n';
  } else if (*evl) {
    Stats st = load<Stats>(owma_stats_load, "reading " + e_stats, e_stats.c_str());
    Schedule sc = load<Schedule>(owma_schedule_load, "reading " + e_schedule, e_schedule.c_str());
    Metrics m = load<Metrics>(owma_evaluate, "evaluating", st.get(), sc.get(), e_ffe, e_window);
    if (!g.out.empty()) check(owma_metrics_save(m.get(), g.out.c_str()), "writing " + g.out);
    owma_metrics_summary s;
    check(owma_metrics_summary_get(m.get(), &s), "metrics");
    std::printf("far=%.6g\nactive_alarm_rate=%.6g\nepisodes=%d\nappearances_detected=%d\n"
                "disappearances_detected=%d\nmissed_transitions=%d\nregion_missed_alarms=%lld\n",
                s.far, s.active_alarm_rate, s.episodes, s.appearances_detected, s.disappearances_detected,
                s.missed_transitions, static_cast<long long>(s.region_missed_alarms));
  } else if (*det) {
    owma_fault_profile prof = d_profile.get(g);
    if (d_select) {
      if (d_src.training.empty()) usage("--select needs --training");
      Training t = load<Training>(owma_training_load, "reading " + d_src.training, d_src.training.c_str());
      owma_solver_options opts;
      owma_solver_options_init(&opts);
      opts.ridge = g.ridge;
      opts.seed = g.seed.value_or(0);
      int w_star = 0;
      int w_sharp = 0;
      const char* table = g.out.empty() ? nullptr : g.out.c_str();
      check(owma_select_window(t.get(), &prof, d_src.alpha, &opts, table, &w_star, &w_sharp), "window selection");
      std::printf("w_sharp=%d\nw_star=%s\n", w_sharp, w_star > 0 ? std::to_string(w_star).c_str() : "none");
    } else {
      Chart c = d_src.build(g);
      owma_verdict v;
      check(owma_detectability(c.get(), &prof, &v), "detectability");
      std::printf("ap_detectable=%d\ndp_detectable=%d\ng_detectable=%d\nguaranteed=%d\nmargin=%.10g\nw_sharp=%d\n",
                  v.ap_detectable, v.dp_detectable, v.g_detectable, v.guaranteed, v.margin, v.w_sharp);
    }
  } else if (*rep) {
    if (r_name.empty() && g.config.empty()) usage("reproduce needs a preset name; available: " + presets_list());
    Config c = open_config(g, r_name);
    if (r_count > 0) check(owma_config_set_count(c.get(), r_count), "count");
    check(owma_config_set_threads(c.get(), r_threads), "threads");
    const std::string dir = out_path(g, "results/" + std::string(owma_config_name(c.get())));
    check(owma_reproduce(c.get(), dir.c_str()), "reproduce");
    print_file(std::filesystem::path(dir) / "summary_mean.csv");
    std::cout << "wrote " << dir << '\n';
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    return f.code;
  }
}
