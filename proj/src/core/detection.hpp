#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/faults.hpp"
#include "core/stationary_model.hpp"

namespace owma {

enum class LimitKind { f, empirical, kde };

const char* to_string(LimitKind kind);
LimitKind parse_limit_kind(const std::string& text);

// Weighted moving average T^2 chart. Immutable once trained.
class ControlChart {
 public:
  ControlChart(WeightVector weight, Eigen::MatrixXd s_tilde, Eigen::VectorXd x_tilde, double limit,
               LimitKind kind, double alpha, int N);

  const WeightVector& weight() const { return weight_; }
  const Eigen::MatrixXd& s_tilde() const { return s_tilde_; }
  const Eigen::VectorXd& x_tilde() const { return x_tilde_; }
  double limit() const { return limit_; }
  LimitKind limit_kind() const { return kind_; }
  double alpha() const { return alpha_; }
  int N() const { return N_; }
  int W() const { return weight_.size(); }
  int p() const { return static_cast<int>(x_tilde_.size()); }

  // Squared Mahalanobis norm of v under s_tilde.
  double mahalanobis(const Eigen::VectorXd& v) const;

 private:
  WeightVector weight_;
  Eigen::MatrixXd s_tilde_;
  Eigen::VectorXd x_tilde_;
  double limit_;
  LimitKind kind_;
  double alpha_;
  int N_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// delta^2 = p (N^2 - 1) / (N (N - p)) F_alpha(p, N - p).
double f_control_limit(int p, int N, double alpha);

// Type-7 sample quantile at probability prob.
double empirical_quantile(std::vector<double> sample, double prob);
// Upper alpha point of a Gaussian kernel density estimate; Silverman bandwidth
// when none is given. Falls back to the empirical quantile if the bandwidth is zero.
double kde_limit(std::span<const double> sample, double alpha, std::optional<double> bandwidth = {});

// T^2 of each training set's weighted mean against the chart.
std::vector<double> training_statistics(const TrainingSet& training, const ControlChart& chart);

ControlChart train_chart(const TrainingSet& training, const WeightVector& a, double alpha, LimitKind kind,
                         double ridge = 0.0);

// window is W x p, rows chronological (last row newest).
double wma_t2(const Eigen::MatrixXd& window, const ControlChart& chart);

struct StatisticSeries {
  std::vector<std::int64_t> t;
  std::vector<double> value;
  std::vector<char> alarm;
  double limit = 0.0;

  std::size_t size() const { return t.size(); }
};

// One value per time index from the W-th observation on.
StatisticSeries monitor(const ObservationSeries& series, const ControlChart& chart);

struct EpisodeOutcome {
  int q = 0;
  std::int64_t appeared_at = 0;
  std::int64_t disappeared_at = 0;
  std::optional<std::int64_t> detected_at;
  std::optional<std::int64_t> cleared_at;
  bool appearance_detected = false;
  bool disappearance_detected = false;
  std::int64_t missed_alarms = 0;  // fully faulty windows without alarm
};

struct DetectionMetrics {
  double far = 0.0;
  std::int64_t fault_free_samples = 0;
  double active_alarm_rate = 0.0;
  std::int64_t active_samples = 0;
  std::int64_t missed_alarms = 0;
  // Statistics without alarm in [mu_first + W - 1, nu_last), the span where
  // every window overlaps the fault cluster when gaps are shorter than W.
  std::int64_t region_missed_alarms = 0;
  std::int64_t region_samples = 0;
  int missed_transitions = 0;
  double mean_detection_delay = 0.0;
  double mean_clearance_delay = 0.0;
  std::vector<EpisodeOutcome> episodes;
};

// Appearance of episode q counts as detected when every statistic in
// [mu + W - 1, nu) alarms (any alarm in [mu, nu) when that span is empty).
// Disappearance counts as detected when the statistic is back under the limit
// somewhere between nu and the next appearance (or the end of the series).
DetectionMetrics evaluate(const StatisticSeries& stats, const FaultSchedule& schedule,
                          std::int64_t fault_free_end, int W);

}  // namespace owma
