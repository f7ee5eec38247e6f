#include <random>

#include "doctest.h"
#include "core/detectability.hpp"
#include "core/error.hpp"
#include "core/simulators.hpp"

using namespace owma;

namespace {

ControlChart identity_chart(int W, int p, double limit) {
  return ControlChart(WeightVector::uniform(W), Eigen::MatrixXd::Identity(p, p), Eigen::VectorXd::Zero(p), limit,
                      LimitKind::f, 0.01, 100);
}

FaultProfile profile(double f, int tau_o, int tau_r, int tau_r_prev, int p = 2) {
  return FaultProfile{UnitDirection(Eigen::VectorXd::Ones(p)), f, tau_o, tau_r, tau_r_prev};
}

}  // namespace

TEST_CASE("longest admissible window is the smallest duration bound") {
  CHECK(max_window(profile(1.0, 15, 20, 12)) == 12);
  CHECK(max_window(profile(1.0, 4, 20, 12)) == 4);
  CHECK_THROWS_AS(max_window(profile(1.0, 0, 20, 12)), Error);
  CHECK_THROWS_AS(max_window(profile(-1.0, 5, 5, 5)), Error);
}

TEST_CASE("verdict compares the weighted shift with twice the limit radius") {
  // Identity covariance: the shift is f, the radius sqrt(4) = 2.
  const ControlChart chart = identity_chart(3, 2, 4.0);
  const DetectabilityVerdict ok = verdict(profile(4.5, 5, 5, 5), chart);
  CHECK(ok.margin == doctest::Approx(0.5));
  CHECK(ok.ap_detectable);
  CHECK(ok.dp_detectable);
  CHECK(ok.g_detectable);
  CHECK(ok.guaranteed);
  CHECK(ok.w_sharp == 5);
  CHECK(ok.reason.empty());

  const DetectabilityVerdict weak = verdict(profile(3.9, 5, 5, 5), chart);
  CHECK_FALSE(weak.ap_detectable);
  CHECK(weak.dp_detectable);
  CHECK_FALSE(weak.g_detectable);
  CHECK_FALSE(weak.reason.empty());

  const DetectabilityVerdict short_r = verdict(profile(10.0, 5, 2, 5), chart);
  CHECK(short_r.ap_detectable);
  CHECK_FALSE(short_r.dp_detectable);
  const DetectabilityVerdict short_o = verdict(profile(10.0, 2, 5, 5), chart);
  CHECK_FALSE(short_o.ap_detectable);
  CHECK(short_o.dp_detectable);
  CHECK_THROWS_AS(verdict(profile(10.0, 5, 5, 5, 3), chart), Error);
}

TEST_CASE("a guaranteed chart catches every transition of a noise-free signal") {
  const int W = 4;
  const ControlChart chart = identity_chart(W, 2, 9.0);
  const FaultProfile prof = profile(6.5, W, W, W);
  REQUIRE(verdict(prof, chart).guaranteed);
  const FaultSchedule sched = schedule_from_profile(prof, 50, 500, 3);
  REQUIRE(sched.size() > 10);
  ObservationSeries s;
  s.values = Eigen::MatrixXd::Zero(560, 2);
  s = inject_faults(s, sched);
  const DetectionMetrics m = evaluate(monitor(s, chart), sched, 49, W);
  CHECK(m.missed_transitions == 0);
  CHECK(m.far == 0.0);
}

TEST_CASE("window selection on independent data") {
  // With independent positions beta(W) = W theta / 2, theta = xi' Sigma^-1 xi.
  Eigen::Matrix2d sigma;
  sigma << 2.0, 0.5, 0.5, 1.0;
  std::vector<Eigen::MatrixXd> lags(12, Eigen::MatrixXd::Zero(2, 2));
  lags[0] = sigma;
  const AutocovarianceTable table = AutocovarianceTable::from_lags(lags, 12);
  const FaultProfile prof{UnitDirection(Eigen::Vector2d(1.0, -1.0)), 3.0, 12, 12, 12};
  const WindowSelection sel = select_window(prof, table, 0.01, 5000, {});
  const double theta = prof.xi.vec().dot(sigma.ldlt().solve(prof.xi.vec()));
  REQUIRE(sel.windows.size() == 12);
  for (std::size_t i = 0; i < sel.windows.size(); ++i) {
    CHECK(sel.beta[i] == doctest::Approx(sel.windows[i] * theta / 2.0).epsilon(1e-9));
  }
  int expected = 0;
  for (int W = 1; W <= 12 && expected == 0; ++W)
    if (W * theta / 2.0 * 9.0 > 2.0 * sel.delta2) expected = W;
  REQUIRE(expected > 0);
  REQUIRE(sel.w_star.has_value());
  CHECK(*sel.w_star == expected);
  CHECK(sel.margin[static_cast<std::size_t>(expected - 1)] > 0.0);
  CHECK(sel.margin[static_cast<std::size_t>(expected - 2)] <= 0.0);

  const FaultProfile tiny{prof.xi, 0.01, 12, 12, 12};
  CHECK_FALSE(select_window(tiny, table, 0.01, 5000, {}).w_star.has_value());
  const FaultProfile longer{prof.xi, 3.0, 13, 13, 13};
  CHECK_THROWS_AS(select_window(longer, table, 0.01, 5000, {}), Error);
}

TEST_CASE("schedules respect the profile bounds and are reproducible") {
  const FaultProfile prof = profile(0.4, 15, 20, 20);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FaultSchedule s = schedule_from_profile(prof, 401, 400, seed);
    REQUIRE(s.size() >= 2);
    CHECK(s[0].mu == 401);
    for (std::size_t q = 0; q < s.size(); ++q) {
      CHECK(s[q].duration() >= 15);
      CHECK(s[q].f >= 0.4);
      CHECK(s[q].nu + 20 <= 801);
      if (q + 1 < s.size()) CHECK(s[q + 1].mu - s[q].nu >= 20);
    }
    const FaultSchedule again = schedule_from_profile(prof, 401, 400, seed);
    REQUIRE(again.size() == s.size());
    for (std::size_t q = 0; q < s.size(); ++q) {
      CHECK(again[q].mu == s[q].mu);
      CHECK(again[q].f == s[q].f);
    }
  }
  CHECK(schedule_from_profile(prof, 401, 400, 1)[1].mu != schedule_from_profile(prof, 401, 400, 2)[1].mu);
}
