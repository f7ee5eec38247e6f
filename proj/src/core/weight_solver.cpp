#include "core/weight_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"
#include "core/random.hpp"

namespace owma {

const char* to_string(SecondOrderStatus s) {
  switch (s) {
    case SecondOrderStatus::strict: return "strict";
    case SecondOrderStatus::weak: return "weak";
    case SecondOrderStatus::violated: return "violated";
  }
  return "violated";
}

namespace {

void check_problem(const AutocovarianceTable& table, const UnitDirection& xi, int W) {
  require(W >= 1 && W <= table.W(), "window " + std::to_string(W) + " exceeds table window " +
                                        std::to_string(table.W()));
  require(xi.dim() == table.p(), "fault direction dimension does not match the data");
}

Eigen::LLT<Eigen::MatrixXd> factor_weighted(const AutocovarianceTable& table, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd s = weighted_covariance(table, a).matrix;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    throw NotPositiveDefinite("weighted covariance is not positive definite", eig.eigenvalues().minCoeff(),
                              eig.eigenvalues().maxCoeff());
  }
  return llt;
}

double relative_residual(const Eigen::MatrixXd& T, const Eigen::VectorXd& a) {
  Eigen::VectorXd r = T * a;
  r[r.size() - 1] -= 1.0;
  const double scale = std::max(1.0, T.cwiseAbs().rowwise().sum().maxCoeff());
  return r.cwiseAbs().maxCoeff() / scale;
}

double symmetry_defect(const Eigen::VectorXd& a) {
  return (a - a.reverse()).cwiseAbs().maxCoeff();
}

struct Run {
  Eigen::VectorXd a;
  bool converged = false;
  bool oscillating = false;
  int iterations = 0;
  double max_sum_defect = 0.0;
  double max_abs_weight = 0.0;
  std::vector<Eigen::VectorXd> trace;
};

Run iterate(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& start,
            double damping, const SolverConfig& config) {
  const int W = static_cast<int>(start.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(W);
  b[W - 1] = 1.0;

  Run run;
  run.a = start;
  Eigen::VectorXd before = start;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= config.max_iter; ++it) {
    const Eigen::MatrixXd T = kkt_matrix(table, xi, run.a);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
    if (!(lu.rcond() > 1e-14)) {
      throw Error(ErrorCode::singular, "KKT matrix is singular at iteration " + std::to_string(it));
    }
    Eigen::VectorXd next = lu.solve(b);
    if (damping < 1.0) next = (1.0 - damping) * run.a + damping * next;
    if (!next.allFinite()) throw Error(ErrorCode::diverged, "weight iteration produced non-finite values");

    run.iterations = it;
    run.max_sum_defect = std::max(run.max_sum_defect, std::abs(next.sum() - 1.0));
    run.max_abs_weight = std::max(run.max_abs_weight, next.cwiseAbs().maxCoeff());
    if (config.keep_trace) run.trace.push_back(next);

    const double step = (next - run.a).cwiseAbs().maxCoeff();
    const double two_step = (next - before).cwiseAbs().maxCoeff();
    before = run.a;
    run.a = next;

    if (step <= config.tol && relative_residual(kkt_matrix(table, xi, run.a), run.a) <= config.tol) {
      run.converged = true;
      return run;
    }
    // A persistent two-cycle: the step does not shrink while every other iterate repeats.
    if (damping >= 1.0 && it >= 4 && two_step < 1e-3 * step && step >= 0.5 * last_step) {
      run.oscillating = true;
      return run;
    }
    last_step = step;
  }
  return run;
}

SolverReport finish(const AutocovarianceTable& table, const UnitDirection& xi, Run run, double bound) {
  SolverReport rep;
  rep.weight = run.a;
  rep.converged = run.converged;
  rep.iterations = run.iterations;
  rep.max_sum_defect = run.max_sum_defect;
  rep.max_abs_weight = run.max_abs_weight;
  rep.trace = std::move(run.trace);
  rep.weight_bound = bound;
  const Eigen::MatrixXd g = gamma_matrix(table, xi, rep.weight);
  rep.residual = relative_residual(kkt_matrix(table, xi, rep.weight), rep.weight);
  rep.beta = 0.5 * rep.weight.dot(g * rep.weight);
  rep.lagrange_multiplier = (g * rep.weight).mean();
  rep.symmetry_defect = symmetry_defect(rep.weight);
  return rep;
}

SolverReport solve_from(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& start,
                        double bound, const SolverConfig& config) {
  Run run;
  run.a = start;
  try {
    run = iterate(table, xi, start, 1.0, config);
  } catch (const Error& e) {
    // The damped retry below gets a chance before giving up.
    if (e.code() != ErrorCode::diverged && e.code() != ErrorCode::singular) throw;
  }
  bool damped = false;
  if (!run.converged) {
    Run retry = iterate(table, xi, start, 0.5, config);
    retry.iterations += run.iterations;
    retry.max_sum_defect = std::max(retry.max_sum_defect, run.max_sum_defect);
    retry.max_abs_weight = std::max(retry.max_abs_weight, run.max_abs_weight);
    if (config.keep_trace) retry.trace.insert(retry.trace.begin(), run.trace.begin(), run.trace.end());
    run = std::move(retry);
    damped = true;
  }
  SolverReport rep = finish(table, xi, std::move(run), bound);
  rep.damped = damped;
  return rep;
}

}  // namespace

Eigen::MatrixXd gamma_matrix(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& a) {
  const int W = static_cast<int>(a.size());
  check_problem(table, xi, W);
  const Eigen::VectorXd u = factor_weighted(table, a).solve(xi.vec());
  Eigen::MatrixXd g(W, W);
  for (int l = 1; l <= W; ++l) {
    g(l - 1, l - 1) = u.dot(table.block(l, l) * u);
    for (int j = l + 1; j <= W; ++j) {
      const double v = u.dot(table.block(l, j) * u);
      g(l - 1, j - 1) = v;
      g(j - 1, l - 1) = v;
    }
  }
  return g;
}

Eigen::MatrixXd kkt_matrix(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd g = gamma_matrix(table, xi, a);
  const int W = static_cast<int>(a.size());
  Eigen::MatrixXd T(W, W);
  for (int l = 0; l + 1 < W; ++l) T.row(l) = g.row(l) - g.row(l + 1);
  T.row(W - 1).setOnes();
  return T;
}

double beta(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& a) {
  check_problem(table, xi, static_cast<int>(a.size()));
  return 0.5 * xi.vec().dot(factor_weighted(table, a).solve(xi.vec()));
}

double beta(const Eigen::VectorXd& a, const UnitDirection& xi, const BlockCovariance& gamma) {
  require(xi.dim() == gamma.p, "fault direction dimension does not match the data");
  const Eigen::MatrixXd s = weighted_covariance(gamma, a).matrix;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    throw NotPositiveDefinite("weighted covariance is not positive definite", eig.eigenvalues().minCoeff(),
                              eig.eigenvalues().maxCoeff());
  }
  return 0.5 * xi.vec().dot(llt.solve(xi.vec()));
}

Eigen::VectorXd beta_gradient(const AutocovarianceTable& table, const UnitDirection& xi, const Eigen::VectorXd& a) {
  return -(gamma_matrix(table, xi, a) * a);
}

double weight_bound(const BlockCovariance& gamma) {
  require_positive_definite(gamma);
  const double W = gamma.k;
  return (W + 1.0) / (2.0 * W) * gamma.lambda_max / gamma.lambda_min;
}

SolverReport fixed_point_solve(const AutocovarianceTable& table, const UnitDirection& xi, int W,
                               const SolverConfig& config) {
  check_problem(table, xi, W);
  require(config.tol > 0.0 && config.max_iter >= 1, "solver needs tol > 0 and max_iter >= 1");
  const BlockCovariance gamma = assemble_block_covariance(table, W);
  const double bound = weight_bound(gamma);

  Eigen::VectorXd start = Eigen::VectorXd::Constant(W, 1.0 / W);
  if (config.init) {
    require(config.init->size() == W, "initial weight length must equal the window");
    require(std::abs(config.init->sum() - 1.0) <= WeightVector::sum_tolerance, "initial weights must sum to one");
    start = *config.init;
  }
  SolverReport best = solve_from(table, xi, start, bound, config);
  if (config.multi_start && W > 1) {
    Rng rng = make_rng(config.seed, "solver-multistart");
    std::exponential_distribution<double> expo(1.0);
    for (int s = 0; s < config.random_starts; ++s) {
      Eigen::VectorXd a0(W);
      for (int j = 0; j < W; ++j) a0[j] = expo(rng);
      a0 /= a0.sum();
      SolverReport cand = solve_from(table, xi, a0, bound, config);
      const bool better_converged = cand.converged && !best.converged;
      const bool higher = cand.converged == best.converged &&
                          cand.beta > best.beta + 1e-12 * std::max(1.0, std::abs(best.beta));
      if (better_converged || higher) {
        cand.starts = best.starts;
        best = std::move(cand);
      }
      ++best.starts;
    }
  }
  best.second_order = second_order_check(table, xi, best.weight).status;
  return best;
}

SolverReport solve_unidimensional(const AutocovarianceTable& table, int W) {
  require(table.p() == 1, "closed form needs a single variable");
  require(W >= 1 && W <= table.W(), "window exceeds table window");
  const BlockCovariance gamma = assemble_block_covariance(table, W);
  const double bound = weight_bound(gamma);

  Eigen::MatrixXd A(W, W);
  for (int l = 1; l < W; ++l)
    for (int j = 1; j <= W; ++j) A(l - 1, j - 1) = table.block(l, j)(0, 0) - table.block(l + 1, j)(0, 0);
  A.row(W - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(W);
  b[W - 1] = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::singular, "closed-form weight system is singular");

  Run run;
  run.a = lu.solve(b);
  run.converged = true;
  run.max_sum_defect = std::abs(run.a.sum() - 1.0);
  run.max_abs_weight = run.a.cwiseAbs().maxCoeff();
  const UnitDirection one(Eigen::VectorXd::Ones(1));
  SolverReport rep = finish(table, one, std::move(run), bound);
  rep.second_order = second_order_check(table, one, rep.weight).status;
  return rep;
}

SolverReport solve_weights(const AutocovarianceTable& table, const UnitDirection& xi, int W,
                           const SolverConfig& config) {
  if (table.p() == 1 && !config.multi_start && !config.init) return solve_unidimensional(table, W);
  return fixed_point_solve(table, xi, W, config);
}

HessianReport second_order_check(const AutocovarianceTable& table, const UnitDirection& xi,
                                 const Eigen::VectorXd& a) {
  const int W = static_cast<int>(a.size());
  check_problem(table, xi, W);
  const int p = table.p();
  const Eigen::MatrixXd s = weighted_covariance(table, a).matrix;
  const Eigen::MatrixXd s_isqrt = inverse_sqrt_spd(s);
  const Eigen::VectorXd u = s_isqrt * (s_isqrt * xi.vec());

  HessianReport rep;
  rep.h_vectors.resize(p, W);
  for (int l = 1; l <= W; ++l) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (int j = 1; j <= W; ++j) m += a[j - 1] * (table.block(l, j) + table.block(l, j).transpose());
    rep.h_vectors.col(l - 1) = s_isqrt * (m * u);
  }
  rep.hessian = rep.h_vectors.transpose() * rep.h_vectors;
  for (int l = 1; l <= W; ++l)
    for (int j = 1; j <= W; ++j) rep.hessian(l - 1, j - 1) -= u.dot(table.block(l, j) * u);
  rep.hessian = 0.5 * (rep.hessian + rep.hessian.transpose()).eval();

  const int count = std::max(0, W - 1);
  rep.bordered_minors.resize(count);
  rep.normalized.resize(count);
  const double scale = std::max(rep.hessian.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  bool strict = true;
  bool weak = true;
  for (int k = 2; k <= W; ++k) {
    Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(k + 1, k + 1);
    bordered.block(0, 1, 1, k).setOnes();
    bordered.block(1, 0, k, 1).setOnes();
    bordered.block(1, 1, k, k) = rep.hessian.topLeftCorner(k, k) / scale;
    const double det_scaled = bordered.determinant();
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    rep.bordered_minors[k - 2] = det_scaled * std::pow(scale, k - 1);
    rep.normalized[k - 2] = sign * det_scaled / k;
    if (!(rep.normalized[k - 2] > 1e-9)) strict = false;
    if (!(rep.normalized[k - 2] >= -1e-9)) weak = false;
  }
  rep.status = strict ? SecondOrderStatus::strict : weak ? SecondOrderStatus::weak : SecondOrderStatus::violated;
  return rep;
}

Eigen::VectorXd equal_weight_necessity(const AutocovarianceTable& table, const UnitDirection& xi, int W) {
  check_problem(table, xi, W);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(W, 1.0 / W);
  const Eigen::VectorXd u = factor_weighted(table, a).solve(xi.vec());
  const AutocovarianceTable sub = table.leading(W);
  Eigen::VectorXd r(std::max(0, W - 1));
  for (int j = 1; j < W; ++j) r[j - 1] = u.dot((sub.lag(j) - sub.lag(W - j)) * u);
  return r;
}

}  // namespace owma
