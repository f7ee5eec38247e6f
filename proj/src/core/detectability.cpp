#include "core/detectability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/random.hpp"

namespace owma {

void validate(const FaultProfile& profile) {
  require(std::isfinite(profile.f_lb) && profile.f_lb > 0.0, "fault magnitude bound must be positive");
  require(profile.tau_o_lb >= 1 && profile.tau_r_lb >= 1 && profile.tau_r_prev_lb >= 1,
          "duration bounds must be at least 1");
}

int max_window(const FaultProfile& profile) {
  validate(profile);
  return std::min({profile.tau_o_lb, profile.tau_r_lb, profile.tau_r_prev_lb});
}

DetectabilityVerdict verdict(const FaultProfile& profile, const ControlChart& chart) {
  validate(profile);
  require(profile.xi.dim() == chart.p(), "fault direction dimension does not match the chart");
  DetectabilityVerdict v;
  const int W = chart.W();
  v.w_sharp = max_window(profile);
  const double shift = std::sqrt(chart.mahalanobis(profile.xi.vec())) * profile.f_lb;
  v.margin = shift - 2.0 * std::sqrt(chart.limit());
  const bool magnitude_ok = v.margin > 0.0;
  v.ap_detectable = magnitude_ok && W <= std::min(profile.tau_r_prev_lb, profile.tau_o_lb);
  v.dp_detectable = W <= profile.tau_r_lb;
  v.g_detectable = v.ap_detectable && v.dp_detectable;
  v.guaranteed = v.g_detectable;

  if (W > v.w_sharp) {
    v.reason = "window " + std::to_string(W) + " exceeds the duration bound W# = " + std::to_string(v.w_sharp);
  } else if (!magnitude_ok) {
    v.reason = "weighted fault shift " + std::to_string(shift) + " does not exceed twice the limit radius " +
               std::to_string(2.0 * std::sqrt(chart.limit()));
  }
  return v;
}

WindowSelection select_window(const FaultProfile& profile, const AutocovarianceTable& table, double alpha, int N,
                              const SolverConfig& config) {
  validate(profile);
  require(profile.xi.dim() == table.p(), "fault direction dimension does not match the data");
  WindowSelection sel;
  sel.w_sharp = max_window(profile);
  require(table.W() >= sel.w_sharp, "training sets hold " + std::to_string(table.W()) +
                                        " positions but the window search needs " + std::to_string(sel.w_sharp));
  sel.delta2 = f_control_limit(table.p(), N, alpha);
  const double f2 = profile.f_lb * profile.f_lb;
  sel.best_margin = -std::numeric_limits<double>::infinity();
  for (int W = 1; W <= sel.w_sharp; ++W) {
    const SolverReport rep = solve_weights(table, profile.xi, W, config);
    const double margin = std::sqrt(2.0 * rep.beta) * profile.f_lb - 2.0 * std::sqrt(sel.delta2);
    sel.windows.push_back(W);
    sel.weights.push_back(rep.weight);
    sel.beta.push_back(rep.beta);
    sel.margin.push_back(margin);
    sel.converged.push_back(rep.converged ? 1 : 0);
    sel.best_margin = std::max(sel.best_margin, margin);
    if (!sel.w_star && rep.beta * f2 > 2.0 * sel.delta2) sel.w_star = W;
  }
  return sel;
}

FaultSchedule schedule_from_profile(const FaultProfile& profile, std::int64_t start, std::int64_t horizon,
                                    std::uint64_t seed, const ScheduleDistribution& dist) {
  validate(profile);
  require(horizon >= 1, "schedule horizon must be positive");
  require(dist.excess_mean > 0.0, "schedule excess mean must be positive");
  Rng rng = make_rng(seed, "schedule");
  std::exponential_distribution<double> excess(1.0 / dist.excess_mean);
  auto draw_duration = [&](int bound) {
    return static_cast<std::int64_t>(std::floor(bound * (1.0 + excess(rng))));
  };

  std::vector<FaultEpisode> episodes;
  const std::int64_t end = start + horizon;
  std::int64_t mu = start;
  while (true) {
    const std::int64_t tau_o = draw_duration(profile.tau_o_lb);
    const std::int64_t tau_r = draw_duration(profile.tau_r_lb);
    const double f = profile.f_lb * (1.0 + excess(rng));
    if (mu + tau_o + profile.tau_r_lb > end) break;
    episodes.push_back({mu, mu + tau_o, profile.xi.vec(), f});
    mu += tau_o + tau_r;
  }
  return FaultSchedule(std::move(episodes));
}

}  // namespace owma
