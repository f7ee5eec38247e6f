#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/detectability.hpp"
#include "core/detection.hpp"
#include "core/faults.hpp"
#include "core/weight_solver.hpp"

namespace owma {

FaultProfile fault_profile(const ExperimentConfig& config);

struct SimulatedData {
  TrainingSet training;
  ObservationSeries baseline;  // consecutive fault-free observations for the PCA baselines
  ObservationSeries test;
  FaultSchedule schedule;
};

// Deterministic in (config, seed); every consumer draws from its own stream.
SimulatedData simulate_experiment(const ExperimentConfig& config, std::uint64_t seed);

struct MethodResult {
  std::string label;      // file-safe name, e.g. owma_W10 or dpca_l9_q
  std::string method;     // owma, ma, pca, ma-pca, dpca
  std::string statistic;  // T2 or Q
  int window = 0;         // smoothing window (0 for pca), lag for dpca
  StatisticSeries stats;
  DetectionMetrics metrics;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  FaultSchedule schedule;
  std::map<int, SolverReport> weights;  // by window
  std::optional<WindowSelection> selection;
  std::vector<MethodResult> methods;
};

ReplicationResult run_replication(const ExperimentConfig& config, std::uint64_t seed);

// Runs config.replication.count seeds starting at config.replication.seed, in parallel.
std::vector<ReplicationResult> run_experiment(const ExperimentConfig& config);

// Per-seed directories with statistics, metrics and weights, plus summary.csv
// (one row per seed and method) and summary_mean.csv (means over seeds).
void write_experiment(const std::filesystem::path& out, const ExperimentConfig& config, const std::string& config_text,
                      const std::vector<ReplicationResult>& results);

struct SummaryRow {
  std::string method;
  std::string statistic;
  int window = 0;
  int replications = 0;
  double mean_far = 0.0;
  double sd_far = 0.0;
  double mean_fdr_active = 0.0;
  double all_detected_fraction = 0.0;  // replications with no missed transition
  double mean_missed_transitions = 0.0;
  double mean_region_missed_alarms = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ReplicationResult>& results);

}  // namespace owma
