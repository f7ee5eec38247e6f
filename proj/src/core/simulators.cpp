#include "core/simulators.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace owma {

FaultSchedule::FaultSchedule(std::vector<FaultEpisode> episodes) : episodes_(std::move(episodes)) {
  for (std::size_t q = 0; q < episodes_.size(); ++q) {
    const FaultEpisode& e = episodes_[q];
    require(e.nu > e.mu, "fault episode must have nu > mu");
    require(e.xi.size() > 0 && e.xi.allFinite() && std::isfinite(e.f), "fault episode has invalid values");
    require(std::abs(e.xi.norm() - 1.0) <= 1e-6, "fault direction must have unit norm");
    if (q > 0) {
      require(e.mu >= episodes_[q - 1].nu, "fault episodes overlap or are out of order");
      require(e.xi.size() == episodes_[q - 1].xi.size(), "fault directions have different dimensions");
    }
  }
}

const char* to_string(NoiseKind kind) { return kind == NoiseKind::gaussian ? "gaussian" : "uniform"; }

NoiseKind parse_noise_kind(const std::string& text) {
  if (text == "gaussian") return NoiseKind::gaussian;
  if (text == "uniform") return NoiseKind::uniform;
  throw Error(ErrorCode::config, "unknown noise kind '" + text + "' (expected gaussian or uniform)");
}

double NoiseSource::draw(double scale) {
  return scale * (kind_ == NoiseKind::gaussian ? normal_(rng_) : uniform_(rng_));
}

AR1Config AR1Config::benchmark(NoiseKind noise) {
  AR1Config c;
  c.A << 0.118, -0.191, 0.847, 0.264;
  c.B << 1.0, 2.0, 3.0, -4.0;
  c.C << 0.811, -0.226, 0.477, 0.415;
  c.D << 0.193, 0.689, -0.320, -0.749;
  c.noise = noise;
  return c;
}

CSTRState cstr_steady_state(const CSTRConfig& c) {
  const double k = c.k0 * std::exp(-c.E_over_R / c.T_sp);
  const double q = c.V * k * c.CA_sp / (c.CAf - c.CA_sp);
  const double rhoCp = c.rho * c.Cp;
  const double Tc = c.T_sp - (q / c.V * (c.Tf - c.T_sp) - c.dH / rhoCp * k * c.CA_sp) * c.V * rhoCp / c.UA;
  CSTRState s;
  s.CA = c.CA_sp;
  s.T = c.T_sp;
  s.IT = (Tc - c.Tc0) * c.tau_i_T / c.Kc_T;
  s.IC = (c.q0 - q) * c.tau_i_C / c.Kc_C;
  return s;
}

namespace {

double coolant(const CSTRConfig& c, const CSTRState& s) {
  return c.Tc0 + c.Kc_T * ((c.T_sp - s.T) + s.IT / c.tau_i_T);
}

double flow(const CSTRConfig& c, const CSTRState& s) {
  return c.q0 - c.Kc_C * ((s.CA - c.CA_sp) + s.IC / c.tau_i_C);
}

CSTRState axpy(const CSTRState& s, double h, const std::array<double, 4>& d) {
  return {s.CA + h * d[0], s.T + h * d[1], s.IT + h * d[2], s.IC + h * d[3]};
}

}  // namespace

std::array<double, 4> cstr_derivative(const CSTRConfig& c, const CSTRState& s, double dTf, double v1, double v2) {
  const double Tc = coolant(c, s);
  const double q = flow(c, s);
  const double k = c.k0 * std::exp(-c.E_over_R / s.T);
  const double rhoCp = c.rho * c.Cp;
  const double dCA = q / c.V * (c.CAf - s.CA) - k * s.CA + v1;
  const double dT = q / c.V * (c.Tf + dTf - s.T) - c.dH / rhoCp * k * s.CA + c.UA / (c.V * rhoCp) * (Tc - s.T) + v2;
  return {dCA, dT, c.T_sp - s.T, s.CA - c.CA_sp};
}

Eigen::Vector4d cstr_outputs(const CSTRConfig& c, const CSTRState& s) {
  return {s.CA, s.T, coolant(c, s), flow(c, s)};
}

namespace {

class AR1Process final : public Process {
 public:
  AR1Process(const AR1Config& c, Rng rng) : c_(c), noise_(c.noise, std::move(rng)) {
    require(c.burn_in >= 0, "burn-in must be non-negative");
    for (int k = 0; k < c.burn_in; ++k) step();
  }

  int dim() const override { return 4; }

  Eigen::VectorXd next(double) override {
    step();
    Eigen::VectorXd x(4);
    x[0] = z_[0] + noise_.draw(c_.v_scale);
    x[1] = z_[1] + noise_.draw(c_.v_scale);
    x.tail<2>() = u_;
    return x;
  }

 private:
  void step() {
    Eigen::Vector2d w;
    w[0] = noise_.draw(c_.w_scale);
    w[1] = noise_.draw(c_.w_scale);
    const Eigen::Vector2d z = c_.A * z_ + c_.B * u_;
    u_ = c_.C * u_ + c_.D * w;
    z_ = z;
  }

  AR1Config c_;
  NoiseSource noise_;
  Eigen::Vector2d z_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d u_ = Eigen::Vector2d::Zero();
};

class CSTRProcess final : public Process {
 public:
  CSTRProcess(const CSTRConfig& c, Rng rng) : c_(c), noise_(c.noise, std::move(rng)), s_(cstr_steady_state(c)) {
    require(c.sample_time > 0.0 && c.substeps >= 1, "CSTR needs a positive sample time and substeps >= 1");
    require(c.burn_in >= 0, "burn-in must be non-negative");
    for (int k = 0; k < c.burn_in; ++k) advance(0.0);
  }

  int dim() const override { return 4; }

  Eigen::VectorXd next(double dTf) override {
    advance(dTf);
    Eigen::Vector4d y = cstr_outputs(c_, s_);
    for (int i = 0; i < 4; ++i) y[i] += noise_.draw(c_.measurement_noise[static_cast<std::size_t>(i)]);
    return y;
  }

 private:
  void advance(double dTf) {
    const double h = c_.sample_time / c_.substeps;
    for (int i = 0; i < c_.substeps; ++i) {
      // Process noise is held constant over each integration step.
      const double v1 = noise_.draw(c_.process_noise[0]);
      const double v2 = noise_.draw(c_.process_noise[1]);
      const auto k1 = cstr_derivative(c_, s_, dTf, v1, v2);
      const auto k2 = cstr_derivative(c_, axpy(s_, h / 2, k1), dTf, v1, v2);
      const auto k3 = cstr_derivative(c_, axpy(s_, h / 2, k2), dTf, v1, v2);
      const auto k4 = cstr_derivative(c_, axpy(s_, h, k3), dTf, v1, v2);
      s_.CA += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      s_.T += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      s_.IT += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
      s_.IC += h / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]);
    }
    if (!std::isfinite(s_.CA) || !std::isfinite(s_.T) || s_.T <= 0.0 || s_.CA < -1.0 || s_.CA > 10.0 * c_.CAf) {
      throw Error(ErrorCode::diverged, "CSTR simulation left the physical range (T = " + std::to_string(s_.T) +
                                           ", C_A = " + std::to_string(s_.CA) + ")");
    }
  }

  CSTRConfig c_;
  NoiseSource noise_;
  CSTRState s_;
};

}  // namespace

std::unique_ptr<Process> make_process(const ProcessConfig& config, std::uint64_t seed, std::string_view stream) {
  Rng rng = make_rng(seed, stream);
  if (const auto* ar = std::get_if<AR1Config>(&config)) return std::make_unique<AR1Process>(*ar, std::move(rng));
  return std::make_unique<CSTRProcess>(std::get<CSTRConfig>(config), std::move(rng));
}

ObservationSeries simulate(const ProcessConfig& config, std::int64_t n, std::uint64_t seed, std::string_view stream,
                           const FaultSchedule* disturbance) {
  require(n >= 0, "series length must be non-negative");
  auto process = make_process(config, seed, stream);
  ObservationSeries out;
  out.values.resize(n, process->dim());
  out.start_index = 1;
  std::size_t q = 0;
  for (std::int64_t r = 0; r < n; ++r) {
    const std::int64_t t = r + 1;
    double dTf = 0.0;
    if (disturbance) {
      const auto& eps = disturbance->episodes();
      while (q < eps.size() && eps[q].nu <= t) ++q;
      if (q < eps.size() && eps[q].mu <= t) dTf = eps[q].f;
    }
    out.values.row(r) = process->next(dTf).transpose();
  }
  return out;
}

ObservationSeries inject_faults(ObservationSeries series, const FaultSchedule& schedule) {
  for (const FaultEpisode& e : schedule.episodes()) {
    require(e.xi.size() == series.dim(), "fault direction dimension does not match the series");
    for (std::int64_t t = e.mu; t < e.nu; ++t) {
      const std::int64_t r = t - series.start_index;
      if (r < 0 || r >= series.length()) continue;
      series.values.row(r) += e.f * e.xi.transpose();
    }
  }
  return series;
}

TrainingSet sample_training_sets(const ProcessConfig& config, int N, int W, int gap, std::uint64_t seed) {
  require(N >= 2 && W >= 1, "training needs N >= 2 and W >= 1");
  require(gap >= 1, "gap between training sets must be at least 1");
  auto process = make_process(config, seed, "training");
  std::vector<Eigen::MatrixXd> sets;
  sets.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd s(process->dim(), W);
    // Chronological draws fill X^W first and X^1 (newest) last.
    for (int j = W; j >= 1; --j) s.col(j - 1) = process->next();
    sets.push_back(std::move(s));
    for (int g = 0; g < gap; ++g) process->next();
  }
  return TrainingSet(std::move(sets));
}

}  // namespace owma
