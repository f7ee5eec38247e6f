#include <random>

#include "doctest.h"
#include "core/baselines.hpp"
#include "core/error.hpp"
#include "support/oracle.hpp"

using namespace owma;

namespace {

Eigen::MatrixXd gaussian_data(int n, const Eigen::MatrixXd& L, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd z(n, L.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < L.cols(); ++j) z(i, j) = n01(rng);
  return (z * L.transpose()).rowwise() + Eigen::RowVectorXd::LinSpaced(L.rows(), 1.0, 4.0);
}

Eigen::MatrixXd mixing(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd L(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) L(i, j) = n01(rng) * (j < 2 ? 3.0 : 0.3);
  return L;
}

}  // namespace

TEST_CASE("PCA eigenvalues match the singular values of the scaled data") {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd x = gaussian_data(500, mixing(5, rng), rng);
  const PcaModel m = pca_fit(x, 0.95, 0.01);
  Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  for (int j = 0; j < 5; ++j) z.col(j) /= std::sqrt(z.col(j).squaredNorm() / 499.0);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(z).singularValues();
  for (int j = 0; j < 5; ++j) CHECK(m.eigenvalues[j] == doctest::Approx(sv[j] * sv[j] / 499.0).epsilon(1e-10));
  CHECK(m.eigenvalues.sum() == doctest::Approx(5.0));

  // Fewest components reaching the variance share.
  double acc = 0.0;
  int r = 0;
  while (acc / 5.0 < 0.95) acc += m.eigenvalues[r++];
  CHECK(m.r == r);
  CHECK(m.loadings.cols() == r);
  CHECK((m.loadings.transpose() * m.loadings - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("training T2 averages r (n - 1) / n and Q vanishes with every component") {
  std::mt19937_64 rng(33);
  const Eigen::MatrixXd x = gaussian_data(300, mixing(4, rng), rng);
  const PcaModel m = pca_fit(x, 0.9, 0.01);
  double t2 = 0.0;
  for (int i = 0; i < 300; ++i) t2 += pca_score(m, x.row(i).transpose()).t2;
  CHECK(t2 / 300.0 == doctest::Approx(m.r * 299.0 / 300.0).epsilon(1e-10));

  const PcaModel full = pca_fit(x, 1.0, 0.01, false);
  CHECK(full.r == 4);
  CHECK(full.q_limit_empirical);
  CHECK(pca_score(full, x.row(7).transpose()).q < 1e-20);
}

TEST_CASE("PCA limits hold about alpha on fresh Gaussian data") {
  std::mt19937_64 rng(35);
  const Eigen::MatrixXd L = mixing(6, rng);
  const PcaModel m = pca_fit(gaussian_data(20000, L, rng), 0.9, 0.01);
  REQUIRE(m.r < 6);
  CHECK_FALSE(m.q_limit_empirical);
  ObservationSeries fresh;
  fresh.values = gaussian_data(40000, L, rng);
  const PcaStatistics s = pca_monitor(m, fresh);
  auto rate = [](const StatisticSeries& st) {
    int a = 0;
    for (char c : st.alarm) a += c;
    return static_cast<double>(a) / static_cast<double>(st.size());
  };
  CHECK(rate(s.t2) == doctest::Approx(0.01).epsilon(0.25));
  CHECK(rate(s.q) == doctest::Approx(0.01).epsilon(0.35));
}

TEST_CASE("lag augmentation puts the newest observation first") {
  Eigen::MatrixXd d(4, 2);
  d << 1, 10, 2, 20, 3, 30, 4, 40;
  const Eigen::MatrixXd a = lag_augment(d, 2);
  REQUIRE(a.rows() == 2);
  REQUIRE(a.cols() == 6);
  Eigen::RowVectorXd first(6);
  first << 3, 30, 2, 20, 1, 10;
  CHECK(a.row(0) == first);
  CHECK(a(1, 0) == 4);
  CHECK(lag_augment(d, 5).rows() == 0);
}

TEST_CASE("moving average smoothing and MA-PCA") {
  ObservationSeries s;
  s.values = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
  s.start_index = 1;
  const ObservationSeries m = ma_smooth(s, 3);
  REQUIRE(m.length() == 4);
  CHECK(m.start_index == 3);
  CHECK(m.values(0, 0) == doctest::Approx(2.0));
  CHECK(m.values(3, 0) == doctest::Approx(5.0));
  CHECK(ma_smooth(s, 7).length() == 0);

  std::mt19937_64 rng(37);
  ObservationSeries train;
  train.values = gaussian_data(2000, mixing(3, rng), rng);
  ObservationSeries test;
  test.values = gaussian_data(50, mixing(3, rng), rng);
  const MaPcaModel one = ma_pca_fit(train, 1, 0.95, 0.01);
  const PcaStatistics a = ma_pca_monitor(one, test);
  const PcaStatistics b = pca_monitor(one.pca, test);
  for (std::size_t i = 0; i < a.t2.size(); ++i) CHECK(a.t2.value[i] == doctest::Approx(b.t2.value[i]));

  const MaPcaModel five = ma_pca_fit(train, 5, 0.95, 0.01);
  const PcaStatistics c = ma_pca_monitor(five, test);
  REQUIRE(c.t2.size() == 46);
  CHECK(c.t2.t.front() == 5);
  const ObservationSeries sm = ma_smooth(test, 5);
  CHECK(c.t2.value[3] == doctest::Approx(5.0 * pca_score(five.pca, sm.values.row(3).transpose()).t2));

  const MaPcaModel stat = ma_pca_fit(train, 5, 0.95, 0.01, MaPcaOrder::statistics);
  const PcaStatistics d = ma_pca_monitor(stat, test);
  double mean = 0.0;
  for (int i = 0; i < 5; ++i) mean += b.q.value[static_cast<std::size_t>(i)] / 5.0;
  CHECK(d.q.value[0] == doctest::Approx(mean));
  CHECK(parse_ma_pca_order("statistics") == MaPcaOrder::statistics);
  CHECK_THROWS_AS(parse_ma_pca_order("both"), Error);
}

TEST_CASE("DPCA scores the lag-augmented series") {
  std::mt19937_64 rng(39);
  ObservationSeries train;
  train.values = gaussian_data(1000, mixing(2, rng), rng);
  const DpcaModel m = dpca_fit(train, 3, 0.99, 0.01);
  CHECK(m.pca.mean.size() == 8);
  ObservationSeries test;
  test.values = train.values.topRows(20);
  const PcaStatistics s = dpca_monitor(m, test);
  REQUIRE(s.t2.size() == 17);
  CHECK(s.t2.t.front() == 4);
  const Eigen::MatrixXd aug = lag_augment(test.values, 3);
  CHECK(s.q.value[2] == doctest::Approx(pca_score(m.pca, aug.row(2).transpose()).q));
  CHECK_THROWS_AS(dpca_fit(train, 0, 0.99, 0.01), Error);
}

TEST_CASE("MA chart is the weighted chart with uniform weights") {
  std::mt19937_64 rng(41);
  const oracle::Var1 v = oracle::random_var1(2, rng);
  const TrainingSet t = oracle::sample_sets(v, 200, 4, rng);
  const ControlChart ma = ma_tcc(t, 4, 0.01);
  const ControlChart ref = train_chart(t, WeightVector::uniform(4), 0.01, LimitKind::f);
  CHECK((ma.s_tilde() - ref.s_tilde()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ma.limit() == ref.limit());
}
