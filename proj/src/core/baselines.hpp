#pragma once

#include <string>

#include <Eigen/Dense>

#include "core/detection.hpp"
#include "core/stationary_model.hpp"

namespace owma {

// Moving average T^2 chart: the weighted chart with uniform weights.
ControlChart ma_tcc(const TrainingSet& training, int W, double alpha, LimitKind kind = LimitKind::f);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;         // ones when not autoscaled
  Eigen::MatrixXd loadings;      // m x r
  Eigen::VectorXd eigenvalues;   // all m, descending
  int r = 0;
  int n = 0;
  double alpha = 0.01;
  double t2_limit = 0.0;
  double q_limit = 0.0;
  bool q_limit_empirical = false;  // Jackson-Mudholkar undefined, fell back to the sample quantile
};

// Retains the fewest components whose cumulative variance share reaches cpv.
// T^2 limit from the F distribution, Q limit from Jackson-Mudholkar.
PcaModel pca_fit(const Eigen::MatrixXd& data, double cpv, double alpha, bool autoscale = true);

struct PcaScore {
  double t2 = 0.0;
  double q = 0.0;
};

PcaScore pca_score(const PcaModel& model, const Eigen::VectorXd& x);

struct PcaStatistics {
  StatisticSeries t2;
  StatisticSeries q;
};

PcaStatistics pca_monitor(const PcaModel& model, const ObservationSeries& series);

// Rows k = W..n hold the mean of observations k-W+1..k.
ObservationSeries ma_smooth(const ObservationSeries& series, int W);

enum class MaPcaOrder { observations, statistics };

const char* to_string(MaPcaOrder order);
MaPcaOrder parse_ma_pca_order(const std::string& text);

struct MaPcaModel {
  PcaModel pca;
  int W = 1;
  MaPcaOrder order = MaPcaOrder::observations;
  double t2_limit = 0.0;
  double q_limit = 0.0;
};

// observations: PCA on raw data, smoothed observations scored as W T^2 and W Q
// against the PCA limits (covariance of the mean of W independent samples).
// statistics: T^2 and Q smoothed over W, limits from the smoothed training statistics.
MaPcaModel ma_pca_fit(const ObservationSeries& training, int W, double cpv, double alpha,
                      MaPcaOrder order = MaPcaOrder::observations);
PcaStatistics ma_pca_monitor(const MaPcaModel& model, const ObservationSeries& series);

// Rows of the lag-augmented matrix are [x_k; x_{k-1}; ...; x_{k-lag}].
Eigen::MatrixXd lag_augment(const Eigen::MatrixXd& data, int lag);

struct DpcaModel {
  int lag = 1;
  PcaModel pca;
};

DpcaModel dpca_fit(const ObservationSeries& training, int lag, double cpv, double alpha);
PcaStatistics dpca_monitor(const DpcaModel& model, const ObservationSeries& series);

}  // namespace owma
