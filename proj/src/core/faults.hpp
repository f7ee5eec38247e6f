#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core/stationary_model.hpp"

namespace owma {

// Active on samples mu <= k < nu.
struct FaultEpisode {
  std::int64_t mu = 0;
  std::int64_t nu = 0;
  Eigen::VectorXd xi;  // unit direction
  double f = 0.0;

  std::int64_t duration() const { return nu - mu; }
};

// Episodes ordered by appearance; consecutive episodes do not overlap.
class FaultSchedule {
 public:
  FaultSchedule() = default;
  explicit FaultSchedule(std::vector<FaultEpisode> episodes);

  const std::vector<FaultEpisode>& episodes() const { return episodes_; }
  std::size_t size() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  const FaultEpisode& operator[](std::size_t q) const { return episodes_[q]; }

 private:
  std::vector<FaultEpisode> episodes_;
};

struct FaultProfile {
  UnitDirection xi;
  double f_lb = 0.0;
  int tau_o_lb = 1;       // shortest appearance duration
  int tau_r_lb = 1;       // shortest disappearance duration
  int tau_r_prev_lb = 1;  // shortest disappearance preceding an appearance
};

void validate(const FaultProfile& profile);

}  // namespace owma
