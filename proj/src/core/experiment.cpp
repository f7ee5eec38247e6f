#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "core/baselines.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "core/random.hpp"
#include "core/simulators.hpp"

namespace owma {

FaultProfile fault_profile(const ExperimentConfig& config) {
  FaultProfile p{UnitDirection(config.fault.xi), config.fault.f_lb, config.fault.tau_o_lb, config.fault.tau_r_lb,
                 config.tau_r_prev()};
  validate(p);
  return p;
}

namespace {

bool uses(const ExperimentConfig& config, const std::string& method) {
  const auto& m = config.monitor.methods;
  return std::find(m.begin(), m.end(), method) != m.end();
}

bool needs_baseline(const ExperimentConfig& config) {
  return uses(config, "pca") || uses(config, "ma-pca") || uses(config, "dpca");
}

void add_pca_results(ReplicationResult& rep, const std::string& method, const std::string& label, int window,
                     int eval_window, const PcaStatistics& stats, const FaultSchedule& schedule,
                     std::int64_t fault_free_end) {
  rep.methods.push_back({label + "_T2", method, "T2", window, stats.t2,
                         evaluate(stats.t2, schedule, fault_free_end, eval_window)});
  rep.methods.push_back({label + "_Q", method, "Q", window, stats.q,
                         evaluate(stats.q, schedule, fault_free_end, eval_window)});
}

}  // namespace

SimulatedData simulate_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  const FaultProfile profile = fault_profile(config);
  TrainingSet training = sample_training_sets(config.process, config.training.sets, config.set_length(),
                                              config.gap(), seed);
  ObservationSeries baseline;
  if (needs_baseline(config) && config.training.baseline_samples > 0) {
    baseline = simulate(config.process, config.training.baseline_samples, seed, "baseline");
  }
  const std::int64_t horizon = config.test.samples - config.test.fault_start + 1;
  FaultSchedule schedule =
      schedule_from_profile(profile, config.test.fault_start, horizon, seed, {config.fault.excess_mean});
  ObservationSeries test;
  if (std::holds_alternative<AR1Config>(config.process)) {
    test = inject_faults(simulate(config.process, config.test.samples, seed, "test"), schedule);
  } else {
    test = simulate(config.process, config.test.samples, seed, "test", &schedule);
  }
  return {std::move(training), std::move(baseline), std::move(test), std::move(schedule)};
}

ReplicationResult run_replication(const ExperimentConfig& config, std::uint64_t seed) {
  const SimulatedData data = simulate_experiment(config, seed);
  const FaultProfile profile = fault_profile(config);
  const auto& mon = config.monitor;
  const std::int64_t ffe = config.test.fault_free_end;

  ReplicationResult rep;
  rep.seed = seed;
  rep.schedule = data.schedule;

  SolverConfig solver;
  solver.multi_start = mon.multi_start;
  solver.seed = seed;

  for (int W : mon.windows) {
    const std::string suffix = "_W" + std::to_string(W);
    if (uses(config, "owma")) {
      const AutocovarianceTable table = estimate_autocovariance(data.training.leading(W)).with_ridge(config.ridge);
      SolverReport weights = solve_weights(table, profile.xi, W, solver);
      const ControlChart chart = train_chart(data.training, WeightVector(weights.weight), mon.alpha, mon.limit,
                                             config.ridge);
      StatisticSeries stats = monitor(data.test, chart);
      DetectionMetrics metrics = evaluate(stats, data.schedule, ffe, W);
      rep.methods.push_back({"owma" + suffix, "owma", "T2", W, std::move(stats), std::move(metrics)});
      rep.weights.emplace(W, std::move(weights));
    }
    if (uses(config, "ma")) {
      const ControlChart chart = train_chart(data.training, WeightVector::uniform(W), mon.alpha, mon.limit,
                                             config.ridge);
      StatisticSeries stats = monitor(data.test, chart);
      DetectionMetrics metrics = evaluate(stats, data.schedule, ffe, W);
      rep.methods.push_back({"ma" + suffix, "ma", "T2", W, std::move(stats), std::move(metrics)});
    }
  }
  if (uses(config, "pca")) {
    const PcaModel model = pca_fit(data.baseline.values, mon.pca_cpv, mon.alpha);
    add_pca_results(rep, "pca", "pca", 0, 1, pca_monitor(model, data.test), data.schedule, ffe);
  }
  if (uses(config, "ma-pca")) {
    for (int W : mon.windows) {
      const MaPcaModel model = ma_pca_fit(data.baseline, W, mon.pca_cpv, mon.alpha, mon.ma_pca_order);
      add_pca_results(rep, "ma-pca", "ma-pca_W" + std::to_string(W), W, W, ma_pca_monitor(model, data.test),
                      data.schedule, ffe);
    }
  }
  if (uses(config, "dpca")) {
    for (int lag : mon.dpca_lags) {
      const DpcaModel model = dpca_fit(data.baseline, lag, mon.dpca_cpv, mon.alpha);
      add_pca_results(rep, "dpca", "dpca_l" + std::to_string(lag), lag, lag + 1, dpca_monitor(model, data.test),
                      data.schedule, ffe);
    }
  }
  if (mon.select_window) {
    const int w_sharp = max_window(profile);
    const TrainingSet sets = sample_training_sets(config.process, config.training.sets, w_sharp, 10 * w_sharp,
                                                  derive_seed(seed, "selection"));
    const AutocovarianceTable table = estimate_autocovariance(sets).with_ridge(config.ridge);
    rep.selection = select_window(profile, table, mon.alpha, config.training.sets, solver);
  }
  return rep;
}

std::vector<ReplicationResult> run_experiment(const ExperimentConfig& config) {
  const int count = config.replication.count;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  int threads = config.replication.threads > 0 ? config.replication.threads
                                               : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, count);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = run_replication(config, config.replication.seed + i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<ReplicationResult>& results) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<const DetectionMetrics*>> groups;
  for (const auto& rep : results) {
    for (const auto& m : rep.methods) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
        return r.method == m.method && r.statistic == m.statistic && r.window == m.window;
      });
      if (it == rows.end()) {
        rows.push_back({m.method, m.statistic, m.window});
        groups.emplace_back();
        it = rows.end() - 1;
      }
      groups[static_cast<std::size_t>(it - rows.begin())].push_back(&m.metrics);
    }
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    SummaryRow& r = rows[g];
    const auto& ms = groups[g];
    r.replications = static_cast<int>(ms.size());
    const double n = static_cast<double>(ms.size());
    for (const auto* m : ms) {
      r.mean_far += m->far;
      r.mean_fdr_active += m->active_alarm_rate;
      r.all_detected_fraction += m->missed_transitions == 0 ? 1.0 : 0.0;
      r.mean_missed_transitions += m->missed_transitions;
      r.mean_region_missed_alarms += static_cast<double>(m->region_missed_alarms);
    }
    r.mean_far /= n;
    r.mean_fdr_active /= n;
    r.all_detected_fraction /= n;
    r.mean_missed_transitions /= n;
    r.mean_region_missed_alarms /= n;
    double ss = 0.0;
    for (const auto* m : ms) ss += (m->far - r.mean_far) * (m->far - r.mean_far);
    r.sd_far = ms.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return rows;
}

void write_experiment(const std::filesystem::path& out, const ExperimentConfig& config, const std::string& config_text,
                      const std::vector<ReplicationResult>& results) {
  using io::format_double;
  io::write_text(out / "config.ini", config_text);

  std::ostringstream summary;
  summary << "seed,method,statistic,window,far,fdr_active,episodes,appearances_detected,disappearances_detected,"
             "missed_transitions,region_missed_alarms,region_samples,mean_detection_delay\n";
  for (const auto& rep : results) {
    const std::filesystem::path dir = out / ("seed_" + std::to_string(rep.seed));
    std::ostringstream sched;
    io::write_schedule(sched, rep.schedule);
    io::write_text(dir / "schedule.csv", sched.str());
    for (const auto& [W, report] : rep.weights) {
      std::ostringstream w;
      io::write_weights(w, report, config.ridge);
      io::write_text(dir / ("weights_W" + std::to_string(W) + ".txt"), w.str());
    }
    if (rep.selection) {
      std::ostringstream s;
      s << "# W#=" << rep.selection->w_sharp << " delta2=" << format_double(rep.selection->delta2)
        << " W*=" << (rep.selection->w_star ? std::to_string(*rep.selection->w_star) : "none") << '\n'
        << "W,beta,margin,converged\n";
      for (std::size_t i = 0; i < rep.selection->windows.size(); ++i) {
        s << rep.selection->windows[i] << ',' << format_double(rep.selection->beta[i]) << ','
          << format_double(rep.selection->margin[i]) << ',' << int(rep.selection->converged[i]) << '\n';
      }
      io::write_text(dir / "window_selection.csv", s.str());
    }
    for (const auto& m : rep.methods) {
      std::ostringstream st;
      io::write_statistics(st, m.stats);
      io::write_text(dir / (m.label + ".csv"), st.str());
      std::ostringstream mt;
      io::write_metrics(mt, m.metrics);
      io::write_text(dir / (m.label + "_metrics.txt"), mt.str());

      int ap = 0;
      int dp = 0;
      for (const auto& e : m.metrics.episodes) {
        ap += e.appearance_detected ? 1 : 0;
        dp += e.disappearance_detected ? 1 : 0;
      }
      summary << rep.seed << ',' << m.method << ',' << m.statistic << ',' << m.window << ','
              << format_double(m.metrics.far) << ',' << format_double(m.metrics.active_alarm_rate) << ','
              << m.metrics.episodes.size() << ',' << ap << ',' << dp << ',' << m.metrics.missed_transitions << ','
              << m.metrics.region_missed_alarms << ',' << m.metrics.region_samples << ','
              << format_double(m.metrics.mean_detection_delay) << '\n';
    }
  }
  io::write_text(out / "summary.csv", summary.str());

  std::ostringstream mean;
  mean << "method,statistic,window,replications,mean_far,sd_far,mean_fdr_active,all_detected_fraction,"
          "mean_missed_transitions,mean_region_missed_alarms\n";
  for (const auto& r : summarize(results)) {
    mean << r.method << ',' << r.statistic << ',' << r.window << ',' << r.replications << ','
         << format_double(r.mean_far) << ',' << format_double(r.sd_far) << ',' << format_double(r.mean_fdr_active)
         << ',' << format_double(r.all_detected_fraction) << ',' << format_double(r.mean_missed_transitions) << ','
         << format_double(r.mean_region_missed_alarms) << '\n';
  }
  io::write_text(out / "summary_mean.csv", mean.str());
}

}  // namespace owma
