#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "core/faults.hpp"
#include "core/random.hpp"
#include "core/stationary_model.hpp"

namespace owma {

enum class NoiseKind { gaussian, uniform };

const char* to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& text);

// Draws scale * N(0, 1) or scale * U(-1/2, 1/2).
class NoiseSource {
 public:
  NoiseSource(NoiseKind kind, Rng rng) : kind_(kind), rng_(std::move(rng)) {}
  double draw(double scale);

 private:
  NoiseKind kind_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-0.5, 0.5};
};

// z_k = A z_{k-1} + B u_{k-1}, u_k = C u_{k-1} + D w_{k-1}, y_k = z_k + v_k,
// observation X_k = [y_k; u_k].
struct AR1Config {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B;
  Eigen::Matrix2d C;
  Eigen::Matrix2d D;
  NoiseKind noise = NoiseKind::gaussian;
  double w_scale = 1.0;            // standard deviation, or uniform amplitude
  double v_scale = std::sqrt(0.1);
  int burn_in = 1000;

  static AR1Config benchmark(NoiseKind noise = NoiseKind::gaussian);
};

// Exothermic CSTR with PI control of T through the coolant temperature Tc and
// of C_A through the flow q. Observation X = [C_A, T, Tc, q]. Time in minutes.
struct CSTRConfig {
  double q0 = 100.0;
  double V = 100.0;
  double CAf = 1.0;
  double Tf = 350.0;
  double k0 = 7.2e10;
  double E_over_R = 8750.0;
  double dH = -5e4;
  double rho = 1000.0;
  double Cp = 0.239;
  double UA = 5e4;
  double CA_sp = 0.5;
  double T_sp = 350.0;
  double Tc0 = 300.0;
  double Kc_T = 20.0;
  double tau_i_T = 0.1;
  double Kc_C = 1000.0;
  double tau_i_C = 0.5;

  double sample_time = 0.05;
  int substeps = 10;
  NoiseKind noise = NoiseKind::gaussian;
  std::array<double, 2> process_noise = {0.1, 3.0};  // on dC_A/dt and dT/dt, held per substep
  std::array<double, 4> measurement_noise = {0.001, 0.02, 0.02, 0.2};
  int burn_in = 1000;
};

struct CSTRState {
  double CA = 0.0;
  double T = 0.0;
  double IT = 0.0;  // integral of T_sp - T
  double IC = 0.0;  // integral of C_A - C_A,sp
};

CSTRState cstr_steady_state(const CSTRConfig& config);
// Time derivative of the state with feed temperature offset dTf and process noise v.
std::array<double, 4> cstr_derivative(const CSTRConfig& config, const CSTRState& s, double dTf, double v1,
                                      double v2);
// Noise-free [C_A, T, Tc, q] at state s.
Eigen::Vector4d cstr_outputs(const CSTRConfig& config, const CSTRState& s);

using ProcessConfig = std::variant<AR1Config, CSTRConfig>;

// A running process; construction performs the burn-in.
class Process {
 public:
  virtual ~Process() = default;
  virtual int dim() const = 0;
  // Next observation; dTf is a feed temperature offset and is ignored by AR(1).
  virtual Eigen::VectorXd next(double dTf = 0.0) = 0;
};

std::unique_ptr<Process> make_process(const ProcessConfig& config, std::uint64_t seed, std::string_view stream);

// n observations with time indices 1..n. For the CSTR the schedule's episodes
// are applied as feed temperature increases f during [mu, nu); for AR(1) they
// are ignored (use inject_faults).
ObservationSeries simulate(const ProcessConfig& config, std::int64_t n, std::uint64_t seed,
                           std::string_view stream = "test", const FaultSchedule* disturbance = nullptr);

// Adds xi f to every observation with mu <= t < nu.
ObservationSeries inject_faults(ObservationSeries series, const FaultSchedule& schedule);

// N sets of W consecutive observations from one chain, `gap` samples discarded between sets.
TrainingSet sample_training_sets(const ProcessConfig& config, int N, int W, int gap, std::uint64_t seed);

}  // namespace owma
