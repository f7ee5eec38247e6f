#include <random>
#include <sstream>

#include "doctest.h"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "support/oracle.hpp"

using namespace owma;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::invalid_argument;
}

const char* minimal = "[fault]\nxi = 0, 0, 1, 0\n";

}  // namespace

TEST_CASE("doubles print in shortest round-trip form") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 5e-324}) {
    CHECK(io::parse_double(io::format_double(v), "test") == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(code_of([] { io::parse_double("1.5x", "here"); }) == ErrorCode::parse);
  CHECK(code_of([] { io::parse_int("2.0", "here"); }) == ErrorCode::parse);
}

TEST_CASE("training sets round trip through csv") {
  std::mt19937_64 rng(51);
  const TrainingSet t = oracle::sample_sets(oracle::random_var1(3, rng), 12, 4, rng);
  std::stringstream ss;
  io::write_training(ss, t);
  const TrainingSet back = io::read_training(ss);
  REQUIRE(back.N() == 12);
  REQUIRE(back.W() == 4);
  for (int i = 0; i < 12; ++i) CHECK(back.set(i) == t.set(i));
  std::istringstream bad("set,j,x1\n1,1,0.5\n1,3,0.2\n");
  CHECK(code_of([&] { io::read_training(bad); }) == ErrorCode::parse);
}

TEST_CASE("series, statistics, schedules and weights round trip") {
  ObservationSeries s;
  s.values = Eigen::MatrixXd::Random(7, 2);
  s.start_index = 4;
  std::stringstream a;
  io::write_observations(a, s);
  const ObservationSeries s2 = io::read_observations(a);
  CHECK(s2.values == s.values);
  CHECK(s2.start_index == 4);

  StatisticSeries st;
  st.limit = 2.0;
  st.t = {3, 4, 5};
  st.value = {1.0, 2.5, 0.1};
  st.alarm = {0, 1, 0};
  std::stringstream b;
  io::write_statistics(b, st);
  const StatisticSeries st2 = io::read_statistics(b);
  CHECK(st2.t == st.t);
  CHECK(st2.value == st.value);
  CHECK(st2.alarm == st.alarm);
  CHECK(st2.limit == 2.0);

  const FaultSchedule sched({FaultEpisode{5, 9, Eigen::Vector2d(0.6, 0.8), 0.7},
                             FaultEpisode{12, 20, Eigen::Vector2d(0.6, 0.8), 1.1}});
  std::stringstream c;
  io::write_schedule(c, sched);
  const FaultSchedule sched2 = io::read_schedule(c);
  REQUIRE(sched2.size() == 2);
  CHECK(sched2[1].mu == 12);
  CHECK(sched2[1].f == 1.1);
  CHECK(sched2[0].xi == sched[0].xi);

  std::stringstream d;
  io::write_weights(d, Eigen::Vector3d(0.2, 0.5, 0.3));
  CHECK(io::read_weights(d) == Eigen::VectorXd(Eigen::Vector3d(0.2, 0.5, 0.3)));
}

TEST_CASE("charts round trip exactly") {
  std::mt19937_64 rng(53);
  const TrainingSet t = oracle::sample_sets(oracle::random_var1(3, rng), 100, 3, rng);
  const ControlChart chart = train_chart(t, WeightVector(Eigen::Vector3d(0.5, 0.3, 0.2)), 0.05, LimitKind::kde);
  std::stringstream ss;
  io::write_chart(ss, chart);
  const ControlChart back = io::read_chart(ss);
  CHECK(back.s_tilde() == chart.s_tilde());
  CHECK(back.x_tilde() == chart.x_tilde());
  CHECK(back.limit() == chart.limit());
  CHECK(back.limit_kind() == LimitKind::kde);
  CHECK(back.N() == 100);
  std::istringstream missing("kind=F\nalpha=0.01\n");
  CHECK(code_of([&] { io::read_chart(missing); }) == ErrorCode::parse);
}

TEST_CASE("missing files are reported as io errors") {
  CHECK(code_of([] { io::load_training("/nonexistent/x.csv"); }) == ErrorCode::io);
  CHECK(code_of([] { load_config("/nonexistent/x.ini"); }) == ErrorCode::config);
}

TEST_CASE("every preset parses and keeps its name") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"num-gaussian", "num-uniform", "cstr-gaussian", "cstr-uniform", "cstr-tau1"});
  for (const auto& n : names) {
    const ExperimentConfig c = preset(n);
    CHECK(c.name == n);
    CHECK(c.fault.xi.size() == 4);
    CHECK(c.replication.count >= 1);
  }
  CHECK(std::holds_alternative<AR1Config>(preset("num-uniform").process));
  CHECK(std::get<AR1Config>(preset("num-uniform").process).noise == NoiseKind::uniform);
  CHECK(std::holds_alternative<CSTRConfig>(preset("cstr-tau1").process));
  CHECK(code_of([] { preset("nope"); }) == ErrorCode::unknown_preset);
}

TEST_CASE("configuration defaults and errors") {
  const ExperimentConfig c = parse_config(minimal);
  CHECK(c.set_length() == 10);
  CHECK(c.gap() == 100);
  CHECK(c.tau_r_prev() == 1);
  CHECK(c.monitor.methods == std::vector<std::string>{"owma"});

  const ExperimentConfig d =
      parse_config(std::string(minimal) + "f_lb = 2\ntau_r_lb = 7\n[monitor]\nwindows = 3, 6\nlimit = empirical\n");
  CHECK(d.set_length() == 6);
  CHECK(d.tau_r_prev() == 7);
  CHECK(d.monitor.limit == LimitKind::empirical);

  const char* bad[] = {
      "[fault]\nxi = 1, 0\n",
      "[fault]\nxi = 0, 0, 0, 0\n",
      "[bogus]\nx = 1\n[fault]\nxi = 1, 0, 0, 0\n",
      "[fault]\nxi = 1, 0, 0, 0\nmystery = 3\n",
      "[fault]\nxi = 1, 0, 0, 0\n[monitor]\nalpha = 1.5\n",
      "[fault]\nxi = 1, 0, 0, 0\n[monitor]\nmethods = owma, svm\n",
      "[fault]\nxi = 1, 0, 0, 0\n[training]\nwindow = 5\n[monitor]\nwindows = 8\n",
      "[fault]\nxi = 1, 0, 0, 0\n[process]\nkind = pendulum\n",
      "[fault]\nxi = 1, 0, 0, 0\n[test]\nsamples = abc\n",
      "",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK(code_of([&] { parse_config(text); }) == ErrorCode::config);
  }
}
