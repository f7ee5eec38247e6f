#pragma once

#include <stdexcept>
#include <string>

namespace owma {

enum class ErrorCode {
  invalid_argument = 1,
  parse,
  io,
  config,
  not_positive_definite,
  singular,
  not_converged,
  diverged,
  unknown_preset,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when a covariance that must be positive definite is not; carries the
// offending smallest eigenvalue so callers can decide on a ridge.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, double lambda_min, double lambda_max)
      : Error(ErrorCode::not_positive_definite, what),
        lambda_min_(lambda_min),
        lambda_max_(lambda_max) {}

  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }

 private:
  double lambda_min_;
  double lambda_max_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::invalid_argument, message);
}

}  // namespace owma
