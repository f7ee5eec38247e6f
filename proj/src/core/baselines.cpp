#include "core/baselines.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "core/distributions.hpp"
#include "core/error.hpp"

namespace owma {

ControlChart ma_tcc(const TrainingSet& training, int W, double alpha, LimitKind kind) {
  return train_chart(training, WeightVector::uniform(W), alpha, kind);
}

namespace {

std::vector<double> training_q(const PcaModel& model, const Eigen::MatrixXd& data) {
  std::vector<double> q(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    q[static_cast<std::size_t>(i)] = pca_score(model, data.row(i).transpose()).q;
  }
  return q;
}

void push(StatisticSeries& s, std::int64_t t, double v) {
  s.t.push_back(t);
  s.value.push_back(v);
  s.alarm.push_back(v > s.limit ? 1 : 0);
}

}  // namespace

PcaModel pca_fit(const Eigen::MatrixXd& data, double cpv, double alpha, bool autoscale) {
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  require(m >= 1 && n > m + 1, "PCA needs more observations than variables");
  require(cpv > 0.0 && cpv <= 1.0, "cumulative variance share must lie in (0, 1]");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(data.allFinite(), "PCA data has non-finite values");

  PcaModel model;
  model.n = static_cast<int>(n);
  model.alpha = alpha;
  model.mean = data.colwise().mean().transpose();
  Eigen::MatrixXd z = data.rowwise() - model.mean.transpose();
  model.scale = Eigen::VectorXd::Ones(m);
  if (autoscale) {
    model.scale = (z.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt().transpose();
    require((model.scale.array() > 0.0).all(), "PCA data has a constant variable");
    z = z * model.scale.cwiseInverse().asDiagonal();
  }
  const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  model.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  const double total = model.eigenvalues.sum();
  require(total > 0.0, "PCA data has no variance");
  double acc = 0.0;
  model.r = static_cast<int>(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    acc += model.eigenvalues[i];
    if (acc / total >= cpv - 1e-12) {
      model.r = static_cast<int>(i) + 1;
      break;
    }
  }
  model.loadings = vectors.leftCols(model.r);

  const double r = model.r;
  const double nd = static_cast<double>(n);
  model.t2_limit = r * (nd * nd - 1.0) / (nd * (nd - r)) * f_upper_quantile(alpha, r, nd - r);

  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
  for (Eigen::Index i = model.r; i < m; ++i) {
    const double l = model.eigenvalues[i];
    theta1 += l;
    theta2 += l * l;
    theta3 += l * l * l;
  }
  const double h0 = theta2 > 0.0 ? 1.0 - 2.0 * theta1 * theta3 / (3.0 * theta2 * theta2) : 0.0;
  if (theta1 > 0.0 && theta2 > 0.0 && h0 > 0.0) {
    const double c = normal_quantile(1.0 - alpha);
    const double inner = c * std::sqrt(2.0 * theta2 * h0 * h0) / theta1 + 1.0 +
                         theta2 * h0 * (h0 - 1.0) / (theta1 * theta1);
    model.q_limit = theta1 * std::pow(inner, 1.0 / h0);
  } else {
    model.q_limit_empirical = true;
    model.q_limit = empirical_quantile(training_q(model, data), 1.0 - alpha);
    if (!(model.q_limit > 0.0)) model.q_limit = std::numeric_limits<double>::min();
  }
  return model;
}

PcaScore pca_score(const PcaModel& model, const Eigen::VectorXd& x) {
  require(x.size() == model.mean.size(), "observation dimension does not match the PCA model");
  const Eigen::VectorXd z = (x - model.mean).cwiseQuotient(model.scale);
  const Eigen::VectorXd t = model.loadings.transpose() * z;
  PcaScore s;
  s.t2 = t.cwiseAbs2().cwiseQuotient(model.eigenvalues.head(model.r)).sum();
  s.q = (z - model.loadings * t).squaredNorm();
  return s;
}

PcaStatistics pca_monitor(const PcaModel& model, const ObservationSeries& series) {
  PcaStatistics out;
  out.t2.limit = model.t2_limit;
  out.q.limit = model.q_limit;
  for (Eigen::Index r = 0; r < series.length(); ++r) {
    const PcaScore s = pca_score(model, series.values.row(r).transpose());
    push(out.t2, series.time_of_row(r), s.t2);
    push(out.q, series.time_of_row(r), s.q);
  }
  return out;
}

ObservationSeries ma_smooth(const ObservationSeries& series, int W) {
  require(W >= 1, "smoothing window must be at least 1");
  ObservationSeries out;
  out.start_index = series.start_index + W - 1;
  const Eigen::Index n = series.length() - W + 1;
  if (n <= 0) {
    out.values.resize(0, series.dim());
    return out;
  }
  out.values.resize(n, series.dim());
  for (Eigen::Index r = 0; r < n; ++r) out.values.row(r) = series.values.middleRows(r, W).colwise().mean();
  return out;
}

const char* to_string(MaPcaOrder order) {
  return order == MaPcaOrder::observations ? "observations" : "statistics";
}

MaPcaOrder parse_ma_pca_order(const std::string& text) {
  if (text == "observations") return MaPcaOrder::observations;
  if (text == "statistics") return MaPcaOrder::statistics;
  throw Error(ErrorCode::config, "unknown MA-PCA order '" + text + "' (expected observations or statistics)");
}

namespace {

StatisticSeries smooth_statistic(const StatisticSeries& s, int W, double limit) {
  StatisticSeries out;
  out.limit = limit;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += s.value[i];
    if (i >= static_cast<std::size_t>(W)) sum -= s.value[i - static_cast<std::size_t>(W)];
    if (i + 1 >= static_cast<std::size_t>(W)) push(out, s.t[i], sum / W);
  }
  return out;
}

}  // namespace

MaPcaModel ma_pca_fit(const ObservationSeries& training, int W, double cpv, double alpha, MaPcaOrder order) {
  require(W >= 1, "smoothing window must be at least 1");
  MaPcaModel model;
  model.W = W;
  model.order = order;
  model.pca = pca_fit(training.values, cpv, alpha);
  if (order == MaPcaOrder::observations) {
    model.t2_limit = model.pca.t2_limit;
    model.q_limit = model.pca.q_limit;
    return model;
  }
  const PcaStatistics raw = pca_monitor(model.pca, training);
  model.t2_limit = empirical_quantile(smooth_statistic(raw.t2, W, 0.0).value, 1.0 - alpha);
  model.q_limit = empirical_quantile(smooth_statistic(raw.q, W, 0.0).value, 1.0 - alpha);
  return model;
}

PcaStatistics ma_pca_monitor(const MaPcaModel& model, const ObservationSeries& series) {
  PcaStatistics out;
  if (model.order == MaPcaOrder::observations) {
    out.t2.limit = model.t2_limit;
    out.q.limit = model.q_limit;
    const ObservationSeries smooth = ma_smooth(series, model.W);
    for (Eigen::Index r = 0; r < smooth.length(); ++r) {
      const PcaScore s = pca_score(model.pca, smooth.values.row(r).transpose());
      push(out.t2, smooth.time_of_row(r), model.W * s.t2);
      push(out.q, smooth.time_of_row(r), model.W * s.q);
    }
    return out;
  }
  const PcaStatistics raw = pca_monitor(model.pca, series);
  out.t2 = smooth_statistic(raw.t2, model.W, model.t2_limit);
  out.q = smooth_statistic(raw.q, model.W, model.q_limit);
  return out;
}

Eigen::MatrixXd lag_augment(const Eigen::MatrixXd& data, int lag) {
  require(lag >= 0, "lag must be non-negative");
  const Eigen::Index m = data.cols();
  const Eigen::Index n = data.rows() - lag;
  if (n <= 0) return Eigen::MatrixXd(0, m * (lag + 1));
  Eigen::MatrixXd out(n, m * (lag + 1));
  for (Eigen::Index r = 0; r < n; ++r)
    for (int d = 0; d <= lag; ++d) out.block(r, d * m, 1, m) = data.row(r + lag - d);
  return out;
}

DpcaModel dpca_fit(const ObservationSeries& training, int lag, double cpv, double alpha) {
  require(lag >= 1, "DPCA lag must be at least 1");
  return {lag, pca_fit(lag_augment(training.values, lag), cpv, alpha)};
}

PcaStatistics dpca_monitor(const DpcaModel& model, const ObservationSeries& series) {
  ObservationSeries augmented;
  augmented.values = lag_augment(series.values, model.lag);
  augmented.start_index = series.start_index + model.lag;
  return pca_monitor(model.pca, augmented);
}

}  // namespace owma
