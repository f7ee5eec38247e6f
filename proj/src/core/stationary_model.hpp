#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace owma {

// Chronological multivariate series; row r holds the observation with time
// index start_index + r.
struct ObservationSeries {
  Eigen::MatrixXd values;
  std::int64_t start_index = 1;

  Eigen::Index length() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
  std::int64_t time_of_row(Eigen::Index r) const { return start_index + r; }
};

// A non-zero direction normalised to unit length on construction.
class UnitDirection {
 public:
  explicit UnitDirection(const Eigen::VectorXd& v);

  const Eigen::VectorXd& vec() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

 private:
  Eigen::VectorXd v_;
};

// Weights applied to the W newest samples; element j-1 multiplies X^j, so
// element 0 weights the newest sample. Sums to one.
class WeightVector {
 public:
  static constexpr double sum_tolerance = 1e-9;

  explicit WeightVector(Eigen::VectorXd a);
  static WeightVector uniform(int W);

  const Eigen::VectorXd& vec() const { return a_; }
  int size() const { return static_cast<int>(a_.size()); }
  double operator[](int j) const { return a_[j]; }

 private:
  Eigen::VectorXd a_;
};

// N sets of W consecutive samples. Set i is stored as a p x W matrix whose
// column j-1 is X^j_i; X^1 is the newest sample of the set.
class TrainingSet {
 public:
  explicit TrainingSet(std::vector<Eigen::MatrixXd> sets);

  int N() const { return static_cast<int>(sets_.size()); }
  int W() const { return W_; }
  int p() const { return p_; }

  const Eigen::MatrixXd& set(int i) const { return sets_[static_cast<std::size_t>(i)]; }
  // j is 1-based with 1 the newest position.
  Eigen::VectorXd sample(int i, int j) const { return sets_[static_cast<std::size_t>(i)].col(j - 1); }

  // Keeps the W newest positions of every set.
  TrainingSet leading(int W) const;

 private:
  std::vector<Eigen::MatrixXd> sets_;
  int W_ = 0;
  int p_ = 0;
};

// W x W grid of p x p blocks R_lj (1-based) with R_jl = R_lj^T.
class AutocovarianceTable {
 public:
  AutocovarianceTable(int W, int p, std::vector<Eigen::MatrixXd> blocks,
                      std::vector<Eigen::VectorXd> position_means);

  // Population table of a stationary process from its lag covariances
  // lags[m] = Cov(X_k, X_{k-m}), m = 0..W-1.
  static AutocovarianceTable from_lags(const std::vector<Eigen::MatrixXd>& lags, int W);

  int W() const { return W_; }
  int p() const { return p_; }
  double ridge() const { return ridge_; }
  bool degenerate() const { return degenerate_; }

  const Eigen::MatrixXd& block(int l, int j) const {
    return blocks_[static_cast<std::size_t>((l - 1) * W_ + (j - 1))];
  }
  const std::vector<Eigen::VectorXd>& position_means() const { return position_means_; }

  // Leading W x W sub-grid; identical to estimating from the W newest positions.
  AutocovarianceTable leading(int W) const;
  // Adds eps * I to every diagonal block, i.e. to the block covariance.
  AutocovarianceTable with_ridge(double eps) const;

  // Lag estimate R_m = Cov(X_k, X_{k-m}) averaged over the table diagonals.
  Eigen::MatrixXd lag(int m) const;

 private:
  int W_;
  int p_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::VectorXd> position_means_;
  double ridge_ = 0.0;
  bool degenerate_ = false;
};

AutocovarianceTable estimate_autocovariance(const TrainingSet& training);

struct BlockCovariance {
  Eigen::MatrixXd gamma;
  int k = 0;
  int p = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
  double asymmetry = 0.0;
  bool positive_definite = false;
};

// Assembles the pk x pk block covariance of the k newest positions.
BlockCovariance assemble_block_covariance(const AutocovarianceTable& table, int k);
// Throws NotPositiveDefinite unless lambda_min > 1e-10 * lambda_max.
void require_positive_definite(const BlockCovariance& gamma);

struct WeightedCovariance {
  Eigen::MatrixXd matrix;
};

// Double-sum form sum_ij a_i a_j R_ij using the leading a.size() positions.
WeightedCovariance weighted_covariance(const AutocovarianceTable& table, const Eigen::VectorXd& a);
// Kronecker form (a (x) I)^T Gamma (a (x) I).
WeightedCovariance weighted_covariance(const BlockCovariance& gamma, const Eigen::VectorXd& a);

struct WeightedMeans {
  Eigen::MatrixXd per_set;  // p x N
  Eigen::VectorXd grand;
};

WeightedMeans weighted_means(const TrainingSet& training, const WeightVector& a);

// Inverse principal square root of a symmetric positive definite matrix.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m);

}  // namespace owma
