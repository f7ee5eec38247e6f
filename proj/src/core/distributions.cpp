#include "core/distributions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace owma {

// Lanczos approximation (g = 7, n = 9). std::lgamma writes the global signgam
// on glibc, which races when charts are trained on several threads.
double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "log_gamma needs a positive argument");
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = c[0];
  for (int i = 1; i < 9; ++i) sum += c[static_cast<std::size_t>(i)] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

namespace {

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Continued fraction for I_x(a, b), modified Lentz.
double beta_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw Error(ErrorCode::not_converged, "incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "incomplete beta needs positive shape parameters");
  require(x >= 0.0 && x <= 1.0, "incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double incomplete_beta_inverse(double a, double b, double prob) {
  require(a > 0.0 && b > 0.0, "incomplete beta inverse needs positive shape parameters");
  require(prob >= 0.0 && prob <= 1.0, "probability must lie in [0, 1]");
  if (prob == 0.0) return 0.0;
  if (prob == 1.0) return 1.0;

  const double lb = log_beta(a, b);
  double lo = 0.0;
  double hi = 1.0;
  double x = a / (a + b);
  for (int it = 0; it < 400; ++it) {
    const double f = incomplete_beta(a, b, x) - prob;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double log_pdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb;
    double next = x - f / std::exp(log_pdf);
    // Newton leaves the bracket far from the root; bisect instead.
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x || hi - lo <= 1e-300) {
      return next;
    }
    x = next;
  }
  return x;
}

double f_upper_quantile(double alpha, double d1, double d2) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(d1 > 0.0 && d2 > 0.0, "F degrees of freedom must be positive");
  // F = d2 x / (d1 (1 - x)) with x ~ Beta(d1/2, d2/2).
  const double x = incomplete_beta_inverse(0.5 * d1, 0.5 * d2, 1.0 - alpha);
  if (x < 0.5) return d2 * x / (d1 * (1.0 - x));
  // Near one, the complementary variable keeps 1 - x accurate.
  const double y = incomplete_beta_inverse(0.5 * d2, 0.5 * d1, alpha);
  return d2 * (1.0 - y) / (d1 * y);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double prob) {
  require(prob > 0.0 && prob < 1.0, "probability must lie in (0, 1)");
  // 1 - prob is exact above one half, and the lower tail avoids cancellation in the Halley step.
  if (prob > 0.5) return -normal_quantile(1.0 - prob);
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (prob < low) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= 1.0 - low) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - prob;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace owma
