#include "core/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/distributions.hpp"
#include "core/error.hpp"

namespace owma {

const char* to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::f: return "F";
    case LimitKind::empirical: return "empirical";
    case LimitKind::kde: return "kde";
  }
  return "F";
}

LimitKind parse_limit_kind(const std::string& text) {
  if (text == "F" || text == "f") return LimitKind::f;
  if (text == "empirical") return LimitKind::empirical;
  if (text == "kde" || text == "KDE") return LimitKind::kde;
  throw Error(ErrorCode::invalid_argument, "unknown limit kind '" + text + "' (expected F, empirical or kde)");
}

ControlChart::ControlChart(WeightVector weight, Eigen::MatrixXd s_tilde, Eigen::VectorXd x_tilde, double limit,
                           LimitKind kind, double alpha, int N)
    : weight_(std::move(weight)),
      s_tilde_(std::move(s_tilde)),
      x_tilde_(std::move(x_tilde)),
      limit_(limit),
      kind_(kind),
      alpha_(alpha),
      N_(N) {
  require(s_tilde_.rows() == x_tilde_.size() && s_tilde_.cols() == x_tilde_.size(),
          "chart covariance and mean dimensions disagree");
  require(std::isfinite(limit_) && limit_ > 0.0, "control limit must be positive and finite");
  require(alpha_ > 0.0 && alpha_ < 1.0, "alpha must lie in (0, 1)");
  llt_.compute(s_tilde_);
  if (llt_.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s_tilde_, Eigen::EigenvaluesOnly);
    throw NotPositiveDefinite("chart covariance is not positive definite", eig.eigenvalues().minCoeff(),
                              eig.eigenvalues().maxCoeff());
  }
}

double ControlChart::mahalanobis(const Eigen::VectorXd& v) const {
  return v.dot(llt_.solve(v));
}

double f_control_limit(int p, int N, double alpha) {
  require(N > p, "F control limit needs N > p");
  const double pd = p;
  const double Nd = N;
  return pd * (Nd * Nd - 1.0) / (Nd * (Nd - pd)) * f_upper_quantile(alpha, pd, Nd - pd);
}

double empirical_quantile(std::vector<double> sample, double prob) {
  require(!sample.empty(), "quantile of an empty sample");
  require(prob >= 0.0 && prob <= 1.0, "quantile probability must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

double kde_limit(std::span<const double> sample, double alpha, std::optional<double> bandwidth) {
  require(sample.size() >= 2, "kernel density limit needs at least two values");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const double n = static_cast<double>(sample.size());
  double h;
  if (bandwidth) {
    require(*bandwidth >= 0.0, "bandwidth must be non-negative");
    h = *bandwidth;
  } else {
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    h = 1.06 * std::sqrt(ss / (n - 1.0)) * std::pow(n, -0.2);
  }
  if (!(h > 0.0)) return empirical_quantile(std::vector<double>(sample.begin(), sample.end()), 1.0 - alpha);

  auto cdf = [&](double x) {
    double s = 0.0;
    for (double v : sample) s += normal_cdf((x - v) / h);
    return s / n;
  };
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  double lo = *mn - 10.0 * h;
  double hi = *mx + 10.0 * h;
  const double target = 1.0 - alpha;
  while (hi - lo > 1e-8 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> training_statistics(const TrainingSet& training, const ControlChart& chart) {
  require(training.p() == chart.p() && training.W() >= chart.W(), "training set does not fit the chart");
  const WeightedMeans means = weighted_means(training, chart.weight());
  std::vector<double> out(static_cast<std::size_t>(training.N()));
  for (int i = 0; i < training.N(); ++i) {
    out[static_cast<std::size_t>(i)] = chart.mahalanobis(means.per_set.col(i) - chart.x_tilde());
  }
  return out;
}

ControlChart train_chart(const TrainingSet& training, const WeightVector& a, double alpha, LimitKind kind,
                         double ridge) {
  require(a.size() <= training.W(), "chart window exceeds training window");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const TrainingSet sub = a.size() == training.W() ? training : training.leading(a.size());
  const AutocovarianceTable table = estimate_autocovariance(sub).with_ridge(ridge);
  Eigen::MatrixXd s = weighted_covariance(table, a.vec()).matrix;
  const Eigen::VectorXd x = weighted_means(sub, a).grand;

  // The chart is built with a placeholder limit when the limit is calibrated on training statistics.
  const int N = sub.N();
  const int p = sub.p();
  if (kind == LimitKind::f) return ControlChart(a, std::move(s), x, f_control_limit(p, N, alpha), kind, alpha, N);

  ControlChart provisional(a, s, x, 1.0, kind, alpha, N);
  std::vector<double> stats = training_statistics(sub, provisional);
  const double limit = kind == LimitKind::empirical ? empirical_quantile(std::move(stats), 1.0 - alpha)
                                                    : kde_limit(stats, alpha);
  return ControlChart(a, std::move(s), x, limit, kind, alpha, N);
}

double wma_t2(const Eigen::MatrixXd& window, const ControlChart& chart) {
  require(window.rows() == chart.W() && window.cols() == chart.p(), "window shape does not match the chart");
  const int W = chart.W();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(chart.p());
  for (int j = 1; j <= W; ++j) x += chart.weight()[j - 1] * window.row(W - j).transpose();
  return chart.mahalanobis(x - chart.x_tilde());
}

StatisticSeries monitor(const ObservationSeries& series, const ControlChart& chart) {
  require(series.dim() == chart.p(), "series dimension does not match the chart");
  require(series.values.allFinite(), "series has non-finite values");
  const int W = chart.W();
  StatisticSeries out;
  out.limit = chart.limit();
  const Eigen::Index n = series.length();
  if (n < W) return out;
  const auto count = static_cast<std::size_t>(n - W + 1);
  out.t.reserve(count);
  out.value.reserve(count);
  out.alarm.reserve(count);
  Eigen::VectorXd x(chart.p());
  for (Eigen::Index r = W - 1; r < n; ++r) {
    x.setZero();
    for (int j = 1; j <= W; ++j) x += chart.weight()[j - 1] * series.values.row(r - j + 1).transpose();
    const double v = chart.mahalanobis(x - chart.x_tilde());
    out.t.push_back(series.time_of_row(r));
    out.value.push_back(v);
    out.alarm.push_back(v > chart.limit() ? 1 : 0);
  }
  return out;
}

DetectionMetrics evaluate(const StatisticSeries& stats, const FaultSchedule& schedule, std::int64_t fault_free_end,
                          int W) {
  require(W >= 1, "window must be at least 1");
  require(stats.value.size() == stats.t.size() && stats.alarm.size() == stats.t.size(),
          "statistic series columns have different lengths");
  for (std::size_t i = 1; i < stats.t.size(); ++i) {
    require(stats.t[i] == stats.t[i - 1] + 1, "statistic series must have consecutive time indices");
  }
  DetectionMetrics m;
  if (stats.t.empty()) return m;
  const std::int64_t t0 = stats.t.front();
  const std::int64_t t_end = stats.t.back() + 1;
  auto alarm_at = [&](std::int64_t t) { return stats.alarm[static_cast<std::size_t>(t - t0)] != 0; };
  auto clip = [&](std::int64_t t) { return std::clamp(t, t0, t_end); };

  std::int64_t ff_alarms = 0;
  for (std::int64_t t = t0; t < clip(fault_free_end + 1); ++t) {
    ++m.fault_free_samples;
    if (alarm_at(t)) ++ff_alarms;
  }
  m.far = m.fault_free_samples > 0 ? static_cast<double>(ff_alarms) / m.fault_free_samples : 0.0;

  std::int64_t active_alarms = 0;
  double delay_sum = 0.0;
  double clear_sum = 0.0;
  int delays = 0;
  int clears = 0;
  const auto& eps = schedule.episodes();
  for (std::size_t q = 0; q < eps.size(); ++q) {
    const FaultEpisode& e = eps[q];
    EpisodeOutcome o;
    o.q = static_cast<int>(q) + 1;
    o.appeared_at = e.mu;
    o.disappeared_at = e.nu;

    for (std::int64_t t = clip(e.mu); t < clip(e.nu); ++t) {
      ++m.active_samples;
      if (alarm_at(t)) {
        ++active_alarms;
        if (!o.detected_at) o.detected_at = t;
      }
    }
    const std::int64_t full_lo = clip(e.mu + W - 1);
    const std::int64_t full_hi = clip(e.nu);
    if (full_lo < full_hi) {
      for (std::int64_t t = full_lo; t < full_hi; ++t)
        if (!alarm_at(t)) ++o.missed_alarms;
      o.appearance_detected = o.missed_alarms == 0;
    } else {
      o.appearance_detected = o.detected_at.has_value();
    }

    const std::int64_t next_mu = q + 1 < eps.size() ? eps[q + 1].mu : t_end;
    for (std::int64_t t = clip(e.nu); t < clip(next_mu); ++t) {
      if (!alarm_at(t)) {
        o.cleared_at = t;
        break;
      }
    }
    o.disappearance_detected = o.cleared_at.has_value();

    if (o.appearance_detected && o.detected_at) {
      delay_sum += static_cast<double>(*o.detected_at - e.mu);
      ++delays;
    }
    if (o.disappearance_detected) {
      clear_sum += static_cast<double>(*o.cleared_at - e.nu);
      ++clears;
    }
    m.missed_alarms += o.missed_alarms;
    m.missed_transitions += (o.appearance_detected ? 0 : 1) + (o.disappearance_detected ? 0 : 1);
    m.episodes.push_back(o);
  }
  if (!eps.empty()) {
    for (std::int64_t t = clip(eps.front().mu + W - 1); t < clip(eps.back().nu); ++t) {
      ++m.region_samples;
      if (!alarm_at(t)) ++m.region_missed_alarms;
    }
  }
  m.active_alarm_rate = m.active_samples > 0 ? static_cast<double>(active_alarms) / m.active_samples : 0.0;
  m.mean_detection_delay = delays > 0 ? delay_sum / delays : 0.0;
  m.mean_clearance_delay = clears > 0 ? clear_sum / clears : 0.0;
  return m;
}

}  // namespace owma
