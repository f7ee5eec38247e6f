#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/detection.hpp"
#include "core/faults.hpp"
#include "core/stationary_model.hpp"
#include "core/weight_solver.hpp"

namespace owma {

struct DetectabilityVerdict {
  bool ap_detectable = false;
  bool dp_detectable = false;
  bool g_detectable = false;
  bool guaranteed = false;
  double margin = 0.0;  // ||S^{-1/2} xi f|| - 2 delta
  int w_sharp = 0;      // largest window the durations allow
  std::string reason;
};

// Longest window compatible with the duration bounds.
int max_window(const FaultProfile& profile);

DetectabilityVerdict verdict(const FaultProfile& profile, const ControlChart& chart);

struct WindowSelection {
  std::optional<int> w_star;  // smallest window whose optimal weights guarantee detection
  int w_sharp = 0;
  double delta2 = 0.0;
  std::vector<int> windows;
  std::vector<Eigen::VectorXd> weights;
  std::vector<double> beta;
  std::vector<double> margin;  // sqrt(2 beta) f - 2 delta, per window
  std::vector<char> converged;
  double best_margin = 0.0;
};

// Searches W = 1..w_sharp on leading sub-tables of one table; the table must
// hold at least w_sharp positions.
WindowSelection select_window(const FaultProfile& profile, const AutocovarianceTable& table, double alpha, int N,
                              const SolverConfig& config = {});

struct ScheduleDistribution {
  double excess_mean = 0.3;  // mean of the exponential excess over each lower bound
};

// Episodes from `start` with magnitude f_lb (1 + E) and durations floor(bound (1 + E)),
// E exponential. Episodes are kept while mu + tau_o + tau_r_lb <= start + horizon.
FaultSchedule schedule_from_profile(const FaultProfile& profile, std::int64_t start, std::int64_t horizon,
                                    std::uint64_t seed, const ScheduleDistribution& dist = {});

}  // namespace owma
