#include <random>

#include "doctest.h"
#include "core/error.hpp"
#include "core/stationary_model.hpp"
#include "support/oracle.hpp"

using namespace owma;

TEST_CASE("weight vectors must sum to one") {
  CHECK_NOTHROW(WeightVector(Eigen::Vector3d(0.2, 0.3, 0.5)));
  CHECK_NOTHROW(WeightVector(Eigen::Vector3d(-0.5, 1.0, 0.5)));
  CHECK_THROWS_AS(WeightVector(Eigen::Vector3d(0.2, 0.3, 0.4)), Error);
  const WeightVector u = WeightVector::uniform(4);
  CHECK(u.size() == 4);
  CHECK(u[3] == doctest::Approx(0.25));
}

TEST_CASE("unit direction is normalised and non-zero") {
  const UnitDirection d(Eigen::Vector2d(3.0, 4.0));
  CHECK(d.vec()[0] == doctest::Approx(0.6));
  CHECK(d.vec().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(UnitDirection(Eigen::Vector2d::Zero()), Error);
}

TEST_CASE("training sets need more sets than variables and finite values") {
  std::vector<Eigen::MatrixXd> two(2, Eigen::MatrixXd::Ones(3, 2));
  CHECK_THROWS_AS(TrainingSet{two}, Error);
  std::vector<Eigen::MatrixXd> sets(5, Eigen::MatrixXd::Ones(2, 3));
  sets[1](0, 0) = std::nan("");
  CHECK_THROWS_AS(TrainingSet{sets}, Error);
  sets[1](0, 0) = 1.0;
  sets[2] = Eigen::MatrixXd::Ones(2, 4);
  CHECK_THROWS_AS(TrainingSet{sets}, Error);
}

TEST_CASE("sample autocovariance matches a direct double loop") {
  std::mt19937_64 rng(5);
  const oracle::Var1 v = oracle::random_var1(2, rng);
  const TrainingSet t = oracle::sample_sets(v, 60, 3, rng);
  const AutocovarianceTable table = estimate_autocovariance(t);
  const int N = t.N();
  for (int l = 1; l <= 3; ++l) {
    for (int j = 1; j <= 3; ++j) {
      Eigen::Vector2d ml = Eigen::Vector2d::Zero();
      Eigen::Vector2d mj = Eigen::Vector2d::Zero();
      for (int i = 0; i < N; ++i) {
        ml += t.sample(i, l);
        mj += t.sample(i, j);
      }
      ml /= N;
      mj /= N;
      Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
      for (int i = 0; i < N; ++i) r += (t.sample(i, l) - ml) * (t.sample(i, j) - mj).transpose();
      r /= N - 1;
      CHECK((table.block(l, j) - r).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  // R_jl is exactly the transpose of R_lj.
  CHECK((table.block(3, 1) - table.block(1, 3).transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample autocovariance converges to the Lyapunov solution") {
  std::mt19937_64 rng(17);
  const oracle::Var1 v = oracle::random_var1(3, rng, 0.7);
  const TrainingSet t = oracle::sample_sets(v, 40000, 3, rng);
  const AutocovarianceTable est = estimate_autocovariance(t);
  const auto lags = v.lags(3);
  const double scale = lags[0].cwiseAbs().maxCoeff();
  for (int m = 0; m < 3; ++m) {
    CHECK((est.lag(m) - lags[static_cast<std::size_t>(m)]).cwiseAbs().maxCoeff() / scale < 0.05);
  }
}

TEST_CASE("lag table convention: newer position first") {
  std::vector<Eigen::MatrixXd> lags = {Eigen::Matrix2d::Identity() * 2.0, Eigen::Matrix2d()};
  lags[1] << 0.5, 0.1, 0.3, 0.4;
  const AutocovarianceTable t = AutocovarianceTable::from_lags(lags, 2);
  // R_12 = Cov(X_k, X_{k-1}) = lag 1, R_21 its transpose.
  CHECK((t.block(1, 2) - lags[1]).norm() == 0.0);
  CHECK((t.block(2, 1) - lags[1].transpose()).norm() == 0.0);
  CHECK((t.lag(1) - lags[1]).norm() == 0.0);
  const AutocovarianceTable r = t.with_ridge(0.25);
  CHECK(r.block(1, 1)(0, 0) == doctest::Approx(2.25));
  CHECK(r.block(1, 2)(0, 0) == doctest::Approx(0.5));
  CHECK(r.ridge() == doctest::Approx(0.25));
  CHECK(t.leading(1).W() == 1);
}

TEST_CASE("block covariance reports definiteness") {
  std::mt19937_64 rng(3);
  const oracle::Var1 v = oracle::random_var1(2, rng);
  const BlockCovariance g = assemble_block_covariance(v.table(4), 4);
  CHECK(g.positive_definite);
  CHECK(g.condition >= 1.0);
  CHECK_NOTHROW(require_positive_definite(g));

  // Two identical variables: the table is singular.
  std::vector<Eigen::MatrixXd> lags = {Eigen::Matrix2d::Ones(), Eigen::Matrix2d::Ones() * 0.5};
  const BlockCovariance s = assemble_block_covariance(AutocovarianceTable::from_lags(lags, 2), 2);
  CHECK_FALSE(s.positive_definite);
  CHECK_THROWS_AS(require_positive_definite(s), NotPositiveDefinite);
}

TEST_CASE("double-sum and Kronecker forms of the weighted covariance agree") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Var1 v = oracle::random_var1(3, rng);
    const AutocovarianceTable t = v.table(5);
    const BlockCovariance g = assemble_block_covariance(t, 5);
    Eigen::VectorXd a = Eigen::VectorXd::Random(5);
    a /= a.sum();
    const Eigen::MatrixXd s1 = weighted_covariance(t, a).matrix;
    const Eigen::MatrixXd s2 = weighted_covariance(g, a).matrix;
    CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-10 * s1.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("weighted means and inverse square root") {
  std::vector<Eigen::MatrixXd> sets;
  for (int i = 0; i < 4; ++i) {
    Eigen::MatrixXd s(1, 2);
    s << i, 10.0 * i;
    sets.push_back(s);
  }
  const WeightedMeans m = weighted_means(TrainingSet(sets), WeightVector(Eigen::Vector2d(0.75, 0.25)));
  CHECK(m.per_set(0, 2) == doctest::Approx(0.75 * 2 + 0.25 * 20));
  CHECK(m.grand[0] == doctest::Approx((0.75 + 2.5) * 1.5));

  Eigen::Matrix2d s;
  s << 4.0, 1.0, 1.0, 3.0;
  const Eigen::MatrixXd r = inverse_sqrt_spd(s);
  CHECK((r * s * r - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}
