#include "core/stationary_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "core/error.hpp"

namespace owma {

UnitDirection::UnitDirection(const Eigen::VectorXd& v) {
  require(v.size() > 0, "direction must not be empty");
  require(v.allFinite(), "direction has non-finite entries");
  const double n = v.norm();
  require(n > 0.0, "direction must be non-zero");
  v_ = v / n;
}

WeightVector::WeightVector(Eigen::VectorXd a) : a_(std::move(a)) {
  require(a_.size() > 0, "weight vector must not be empty");
  require(a_.allFinite(), "weight vector has non-finite entries");
  require(std::abs(a_.sum() - 1.0) <= sum_tolerance,
          "weights must sum to one (sum = " + std::to_string(a_.sum()) + ")");
}

WeightVector WeightVector::uniform(int W) {
  require(W >= 1, "window must be at least 1");
  return WeightVector(Eigen::VectorXd::Constant(W, 1.0 / W));
}

TrainingSet::TrainingSet(std::vector<Eigen::MatrixXd> sets) : sets_(std::move(sets)) {
  require(!sets_.empty(), "training set is empty");
  p_ = static_cast<int>(sets_.front().rows());
  W_ = static_cast<int>(sets_.front().cols());
  require(p_ >= 1 && W_ >= 1, "training sets need p >= 1 and W >= 1");
  for (const auto& s : sets_) {
    require(s.rows() == p_ && s.cols() == W_, "training sets have inconsistent shapes");
    require(s.allFinite(), "training set has non-finite values");
  }
  require(N() > p_, "need more sets than variables (N > p), got N = " + std::to_string(N()) +
                        ", p = " + std::to_string(p_));
}

TrainingSet TrainingSet::leading(int W) const {
  require(W >= 1 && W <= W_, "leading window out of range");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sets_.size());
  for (const auto& s : sets_) out.emplace_back(s.leftCols(W));
  return TrainingSet(std::move(out));
}

AutocovarianceTable::AutocovarianceTable(int W, int p, std::vector<Eigen::MatrixXd> blocks,
                                         std::vector<Eigen::VectorXd> position_means)
    : W_(W), p_(p), blocks_(std::move(blocks)), position_means_(std::move(position_means)) {
  require(W >= 1 && p >= 1, "table needs W >= 1 and p >= 1");
  require(blocks_.size() == static_cast<std::size_t>(W) * W, "table needs W*W blocks");
  for (const auto& b : blocks_) {
    require(b.rows() == p && b.cols() == p, "table blocks must be p x p");
    require(b.allFinite(), "table has non-finite entries");
  }
  for (int l = 1; l <= W; ++l) {
    if ((block(l, l).diagonal().array() <= 0.0).any()) degenerate_ = true;
  }
}

AutocovarianceTable AutocovarianceTable::from_lags(const std::vector<Eigen::MatrixXd>& lags, int W) {
  require(W >= 1 && lags.size() >= static_cast<std::size_t>(W), "need lags 0..W-1");
  const int p = static_cast<int>(lags[0].rows());
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(W) * W);
  // X^l is X_{k-l+1}, so R_lj = Cov(X_{k-l+1}, X_{k-j+1}) = R_{j-l} for j >= l.
  for (int l = 1; l <= W; ++l) {
    for (int j = 1; j <= W; ++j) {
      const auto idx = static_cast<std::size_t>((l - 1) * W + (j - 1));
      blocks[idx] = j >= l ? lags[static_cast<std::size_t>(j - l)]
                           : Eigen::MatrixXd(lags[static_cast<std::size_t>(l - j)].transpose());
    }
  }
  std::vector<Eigen::VectorXd> means(static_cast<std::size_t>(W), Eigen::VectorXd::Zero(p));
  return AutocovarianceTable(W, p, std::move(blocks), std::move(means));
}

AutocovarianceTable AutocovarianceTable::leading(int W) const {
  require(W >= 1 && W <= W_, "leading window out of range");
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(W) * W);
  for (int l = 1; l <= W; ++l)
    for (int j = 1; j <= W; ++j) blocks.push_back(block(l, j));
  std::vector<Eigen::VectorXd> means(position_means_.begin(), position_means_.begin() + W);
  AutocovarianceTable out(W, p_, std::move(blocks), std::move(means));
  out.ridge_ = ridge_;
  return out;
}

AutocovarianceTable AutocovarianceTable::with_ridge(double eps) const {
  require(eps >= 0.0 && std::isfinite(eps), "ridge must be non-negative");
  AutocovarianceTable out = *this;
  for (int l = 1; l <= W_; ++l) {
    out.blocks_[static_cast<std::size_t>((l - 1) * W_ + (l - 1))].diagonal().array() += eps;
  }
  out.ridge_ = ridge_ + eps;
  out.degenerate_ = false;
  for (int l = 1; l <= W_; ++l) {
    if ((out.block(l, l).diagonal().array() <= 0.0).any()) out.degenerate_ = true;
  }
  return out;
}

Eigen::MatrixXd AutocovarianceTable::lag(int m) const {
  require(m >= 0 && m < W_, "lag out of table range");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p_, p_);
  for (int l = 1; l + m <= W_; ++l) sum += block(l, l + m);
  return sum / static_cast<double>(W_ - m);
}

AutocovarianceTable estimate_autocovariance(const TrainingSet& training) {
  const int N = training.N();
  const int W = training.W();
  const int p = training.p();
  const int dim = p * W;

  // Stack each set into one column: rows (j-1)*p .. j*p-1 hold X^j.
  Eigen::MatrixXd Y(dim, N);
  for (int i = 0; i < N; ++i) {
    Y.col(i) = Eigen::Map<const Eigen::VectorXd>(training.set(i).data(), dim);
  }
  const Eigen::VectorXd mean = Y.rowwise().mean();
  Y.colwise() -= mean;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  G.selfadjointView<Eigen::Lower>().rankUpdate(Y, 1.0 / (N - 1));
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();

  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(W) * W);
  for (int l = 1; l <= W; ++l) {
    for (int j = l; j <= W; ++j) {
      Eigen::MatrixXd b = G.block((l - 1) * p, (j - 1) * p, p, p);
      if (j == l) b = 0.5 * (b + b.transpose()).eval();
      blocks[static_cast<std::size_t>((j - 1) * W + (l - 1))] = b.transpose();
      blocks[static_cast<std::size_t>((l - 1) * W + (j - 1))] = std::move(b);
    }
  }
  std::vector<Eigen::VectorXd> means;
  means.reserve(static_cast<std::size_t>(W));
  for (int j = 0; j < W; ++j) means.emplace_back(mean.segment(j * p, p));
  return AutocovarianceTable(W, p, std::move(blocks), std::move(means));
}

BlockCovariance assemble_block_covariance(const AutocovarianceTable& table, int k) {
  require(k >= 1 && k <= table.W(), "block covariance order out of table range");
  const int p = table.p();
  BlockCovariance out;
  out.k = k;
  out.p = p;
  out.gamma.resize(p * k, p * k);
  for (int l = 1; l <= k; ++l)
    for (int j = 1; j <= k; ++j) out.gamma.block((l - 1) * p, (j - 1) * p, p, p) = table.block(l, j);

  const double scale = std::max(out.gamma.cwiseAbs().maxCoeff(), 1e-300);
  out.asymmetry = (out.gamma - out.gamma.transpose()).cwiseAbs().maxCoeff() / scale;
  if (out.asymmetry > 1e-10) {
    throw Error(ErrorCode::invalid_argument,
                "block covariance is not symmetric (relative defect " + std::to_string(out.asymmetry) + ")");
  }
  out.gamma = 0.5 * (out.gamma + out.gamma.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.gamma, Eigen::EigenvaluesOnly);
  out.lambda_min = eig.eigenvalues().minCoeff();
  out.lambda_max = eig.eigenvalues().maxCoeff();
  out.positive_definite = out.lambda_max > 0.0 && out.lambda_min > 1e-10 * out.lambda_max;
  out.condition = out.positive_definite ? out.lambda_max / out.lambda_min
                                        : std::numeric_limits<double>::infinity();
  return out;
}

void require_positive_definite(const BlockCovariance& gamma) {
  if (!gamma.positive_definite) {
    throw NotPositiveDefinite("block covariance of order " + std::to_string(gamma.k) +
                                  " is not positive definite (lambda_min = " +
                                  std::to_string(gamma.lambda_min) + ")",
                              gamma.lambda_min, gamma.lambda_max);
  }
}

namespace {

void check_weight_argument(const Eigen::VectorXd& a, int W_available) {
  require(a.size() >= 1 && a.size() <= W_available, "weight length exceeds table window");
  require(a.allFinite(), "weights have non-finite entries");
  require(a.cwiseAbs().maxCoeff() > 0.0, "weights must not all be zero");
}

}  // namespace

WeightedCovariance weighted_covariance(const AutocovarianceTable& table, const Eigen::VectorXd& a) {
  check_weight_argument(a, table.W());
  const int W = static_cast<int>(a.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(table.p(), table.p());
  for (int l = 1; l <= W; ++l)
    for (int j = 1; j <= W; ++j) s += a[l - 1] * a[j - 1] * table.block(l, j);
  return {0.5 * (s + s.transpose())};
}

WeightedCovariance weighted_covariance(const BlockCovariance& gamma, const Eigen::VectorXd& a) {
  check_weight_argument(a, gamma.k);
  require(a.size() == gamma.k, "weight length must match block covariance order");
  const int p = gamma.p;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p * gamma.k, p);
  for (int j = 0; j < gamma.k; ++j) K.block(j * p, 0, p, p) = a[j] * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd s = K.transpose() * gamma.gamma * K;
  return {0.5 * (s + s.transpose())};
}

WeightedMeans weighted_means(const TrainingSet& training, const WeightVector& a) {
  require(a.size() <= training.W(), "weight length exceeds training window");
  WeightedMeans out;
  out.per_set.resize(training.p(), training.N());
  for (int i = 0; i < training.N(); ++i) {
    out.per_set.col(i) = training.set(i).leftCols(a.size()) * a.vec();
  }
  out.grand = out.per_set.rowwise().mean();
  return out;
}

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw NotPositiveDefinite("matrix is not positive definite", ev.minCoeff(), ev.maxCoeff());
  }
  return eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace owma
