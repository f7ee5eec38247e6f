#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core/baselines.hpp"
#include "core/detection.hpp"
#include "core/simulators.hpp"

namespace owma {

struct TrainingConfig {
  int sets = 5000;
  int window = 0;            // set length; 0 means the largest monitor window
  int gap = 0;               // 0 means ten times the set length
  int baseline_samples = 50000;
};

struct TestConfig {
  std::int64_t samples = 800;
  std::int64_t fault_start = 401;
  std::int64_t fault_free_end = 400;
};

struct FaultConfig {
  Eigen::VectorXd xi;
  double f_lb = 1.0;
  int tau_o_lb = 1;
  int tau_r_lb = 1;
  int tau_r_prev_lb = 0;  // 0 means tau_r_lb
  double excess_mean = 0.3;
};

struct MonitorConfig {
  std::vector<std::string> methods = {"owma"};
  std::vector<int> windows = {10};
  double alpha = 0.01;
  LimitKind limit = LimitKind::f;
  std::vector<int> dpca_lags = {1};
  double pca_cpv = 0.95;
  double dpca_cpv = 0.99;
  MaPcaOrder ma_pca_order = MaPcaOrder::observations;
  bool multi_start = false;
  bool select_window = false;
};

struct ReplicationConfig {
  std::uint64_t seed = 1;
  int count = 1;
  int threads = 0;  // 0 means hardware concurrency
};

struct ExperimentConfig {
  std::string name = "custom";
  ProcessConfig process = AR1Config::benchmark();
  TrainingConfig training;
  TestConfig test;
  FaultConfig fault;
  MonitorConfig monitor;
  ReplicationConfig replication;
  double ridge = 0.0;

  int set_length() const;
  int gap() const;
  int tau_r_prev() const { return fault.tau_r_prev_lb > 0 ? fault.tau_r_prev_lb : fault.tau_r_lb; }
};

// INI text with sections [process], [ar1], [cstr], [training], [test], [fault],
// [monitor], [replication]. Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

const std::vector<std::pair<std::string, std::string>>& embedded_presets();
std::vector<std::string> preset_names();
// Throws Error(unknown_preset) listing the available names.
const std::string& preset_text(const std::string& name);
ExperimentConfig preset(const std::string& name);

}  // namespace owma
