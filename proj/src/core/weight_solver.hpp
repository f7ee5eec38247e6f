#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "core/stationary_model.hpp"

namespace owma {

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 500;
  std::optional<Eigen::VectorXd> init;  // defaults to uniform weights
  bool multi_start = false;
  int random_starts = 8;
  std::uint64_t seed = 0;
  bool keep_trace = false;
};

enum class SecondOrderStatus { strict, weak, violated };

const char* to_string(SecondOrderStatus s);

struct HessianReport {
  Eigen::MatrixXd hessian;         // Hessian of beta in the weights
  Eigen::MatrixXd h_vectors;       // column l-1 holds h_l
  Eigen::VectorXd bordered_minors; // entry k-2 holds det of the bordered minor of order k
  Eigen::VectorXd normalized;      // (-1)^k det / (k s^(k-1)), s = max |H_ij|
  SecondOrderStatus status = SecondOrderStatus::violated;
};

struct SolverReport {
  Eigen::VectorXd weight;
  bool converged = false;
  int iterations = 0;
  // max |T(a) a - b| / max(1, ||T(a)||_inf) at the returned weight
  double residual = 0.0;
  double beta = 0.0;
  double lagrange_multiplier = 0.0;
  double symmetry_defect = 0.0;
  double weight_bound = 0.0;  // d_W = (W+1)/(2W) * cond(Gamma)
  bool damped = false;
  int starts = 1;
  // Worst values over every iterate visited.
  double max_sum_defect = 0.0;
  double max_abs_weight = 0.0;
  std::vector<Eigen::VectorXd> trace;
  SecondOrderStatus second_order = SecondOrderStatus::violated;
};

// gamma_lj = u^T R_lj u with u = S(a)^{-1} xi.
Eigen::MatrixXd gamma_matrix(const AutocovarianceTable& table, const UnitDirection& xi,
                             const Eigen::VectorXd& a);
Eigen::MatrixXd kkt_matrix(const AutocovarianceTable& table, const UnitDirection& xi,
                           const Eigen::VectorXd& a);

// beta(a) = xi^T S(a)^{-1} xi / 2.
double beta(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& a);
double beta(const Eigen::VectorXd& a, const UnitDirection& xi, const BlockCovariance& gamma);
// Analytic gradient of beta: -gamma(a) a.
Eigen::VectorXd beta_gradient(const AutocovarianceTable& table, const UnitDirection& xi,
                              const Eigen::VectorXd& a);

double weight_bound(const BlockCovariance& gamma);

SolverReport fixed_point_solve(const AutocovarianceTable& table, const UnitDirection& xi, int W,
                               const SolverConfig& config = {});
// Closed form for one variable.
SolverReport solve_unidimensional(const AutocovarianceTable& table, int W);
// Picks the closed form when p == 1 and always fills the second-order status.
SolverReport solve_weights(const AutocovarianceTable& table, const UnitDirection& xi, int W,
                           const SolverConfig& config = {});

HessianReport second_order_check(const AutocovarianceTable& table, const UnitDirection& xi,
                                 const Eigen::VectorXd& a);

// u^T (R_j - R_{W-j}) u at a = 1/W for j = 1..W-1; all zero when uniform
// weights satisfy the stationarity conditions.
Eigen::VectorXd equal_weight_necessity(const AutocovarianceTable& table, const UnitDirection& xi, int W);

}  // namespace owma
