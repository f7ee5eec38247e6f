#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "core/stationary_model.hpp"

namespace oracle {

// Stationary covariance of x_k = A x_{k-1} + e_k, Cov(e) = Q, from
// vec(S) = (I - A (x) A)^{-1} vec(Q).
inline Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index p = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(p * p, p * p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) K.block(i * p, j * p, p, p) -= A(i, j) * A;
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), p * p);
  const Eigen::VectorXd s = K.fullPivLu().solve(q);
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(s.data(), p, p);
  return 0.5 * (S + S.transpose());
}

struct Var1 {
  Eigen::MatrixXd A;
  Eigen::MatrixXd L;  // noise factor, Cov(e) = L L^T

  Eigen::MatrixXd noise_cov() const { return L * L.transpose(); }
  Eigen::MatrixXd stationary() const { return lyapunov(A, noise_cov()); }

  // lags[m] = Cov(x_k, x_{k-m}) = A^m S.
  std::vector<Eigen::MatrixXd> lags(int W) const {
    std::vector<Eigen::MatrixXd> out;
    Eigen::MatrixXd c = stationary();
    for (int m = 0; m < W; ++m) {
      out.push_back(c);
      c = A * c;
    }
    return out;
  }

  owma::AutocovarianceTable table(int W) const { return owma::AutocovarianceTable::from_lags(lags(W), W); }
};

inline Var1 random_var1(int p, std::mt19937_64& rng, double radius = 0.8) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd A(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = n01(rng);
  const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
  std::uniform_real_distribution<double> r(0.1, radius);
  A *= r(rng) / rho;
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < i; ++j) L(i, j) = 0.5 * n01(rng);
  return {A, L};
}

// N independent stretches of the process, each started from its stationary
// law; column j-1 of each set holds the j-th newest sample.
inline owma::TrainingSet sample_sets(const Var1& v, int N, int W, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  const Eigen::Index p = v.A.rows();
  const Eigen::LLT<Eigen::MatrixXd> chol(v.stationary());
  const Eigen::MatrixXd Ls = chol.matrixL();
  std::vector<Eigen::MatrixXd> sets;
  sets.reserve(static_cast<std::size_t>(N));
  Eigen::VectorXd z(p);
  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd s(p, W);
    for (Eigen::Index k = 0; k < p; ++k) z[k] = n01(rng);
    Eigen::VectorXd x = Ls * z;
    for (int j = W - 1; j >= 0; --j) {
      s.col(j) = x;
      for (Eigen::Index k = 0; k < p; ++k) z[k] = n01(rng);
      x = v.A * x + v.L * z;
    }
    sets.push_back(std::move(s));
  }
  return owma::TrainingSet(std::move(sets));
}

inline owma::TrainingSet iid_sets(int N, int W, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  std::vector<Eigen::MatrixXd> sets;
  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd s(p, W);
    for (int j = 0; j < W; ++j)
      for (int k = 0; k < p; ++k) s(k, j) = n01(rng);
    sets.push_back(std::move(s));
  }
  return owma::TrainingSet(std::move(sets));
}

// xi^T S(a)^{-1} xi / 2 with S(a) = sum_ij a_i a_j R_ij, evaluated directly
// from the blocks.
inline double beta(const owma::AutocovarianceTable& t, const Eigen::VectorXd& xi, const Eigen::VectorXd& a) {
  const int W = static_cast<int>(a.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(t.p(), t.p());
  for (int i = 1; i <= W; ++i)
    for (int j = 1; j <= W; ++j) S += a[i - 1] * a[j - 1] * t.block(i, j);
  const Eigen::VectorXd u = xi.normalized();
  return 0.5 * u.dot(S.ldlt().solve(u));
}

// Maximum of beta over the plane sum(a) = 1 by grid search on the first W-1
// coordinates. Exhaustive at the given pitch over [lo, hi]^(W-1) when
// `levels` is 1; otherwise each level searches a +-2 pitch neighbourhood of the
// previous optimum at a pitch five times finer, ending at `pitch`.
struct GridResult {
  double beta = -1.0;
  Eigen::VectorXd a;
  long long evaluations = 0;
};

inline GridResult grid_search(const owma::AutocovarianceTable& t, const Eigen::VectorXd& xi, int W, double lo,
                              double hi, double pitch, int levels = 1) {
  GridResult best;
  if (W == 1) {
    best.a = Eigen::VectorXd::Ones(1);
    best.beta = beta(t, xi, best.a);
    best.evaluations = 1;
    return best;
  }
  const int d = W - 1;
  double h = pitch * std::pow(5.0, levels - 1);
  Eigen::VectorXd lower = Eigen::VectorXd::Constant(d, lo);
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(d, hi);
  for (int level = 0; level < levels; ++level) {
    std::vector<int> counts(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) counts[static_cast<std::size_t>(k)] =
        static_cast<int>(std::llround((upper[k] - lower[k]) / h)) + 1;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd a(W);
    GridResult level_best;
    while (true) {
      double sum = 0.0;
      for (int k = 0; k < d; ++k) {
        a[k] = lower[k] + h * idx[static_cast<std::size_t>(k)];
        sum += a[k];
      }
      a[d] = 1.0 - sum;
      const double b = beta(t, xi, a);
      ++best.evaluations;
      if (b > level_best.beta) {
        level_best.beta = b;
        level_best.a = a;
      }
      int k = 0;
      while (k < d && ++idx[static_cast<std::size_t>(k)] == counts[static_cast<std::size_t>(k)]) {
        idx[static_cast<std::size_t>(k)] = 0;
        ++k;
      }
      if (k == d) break;
    }
    best.beta = level_best.beta;
    best.a = level_best.a;
    for (int k = 0; k < d; ++k) {
      lower[k] = level_best.a[k] - 2.0 * h;
      upper[k] = level_best.a[k] + 2.0 * h;
    }
    h /= 5.0;
  }
  return best;
}

}  // namespace oracle
