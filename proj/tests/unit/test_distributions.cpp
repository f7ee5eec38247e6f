#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "core/distributions.hpp"

using namespace owma;

TEST_CASE("regularized incomplete beta against Boost") {
  for (double a : {0.5, 1.0, 2.0, 7.5, 50.0, 2500.0}) {
    for (double b : {0.5, 1.5, 4.0, 30.0, 4996.0}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.999}) {
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
  }
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("incomplete beta inverse round trip") {
  for (double a : {0.7, 2.0, 2.0, 40.0}) {
    for (double b : {0.9, 3.0, 2498.0}) {
      for (double prob : {0.001, 0.05, 0.5, 0.95, 0.99}) {
        const double x = incomplete_beta_inverse(a, b, prob);
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(prob).epsilon(1e-9));
        CHECK(x == doctest::Approx(boost::math::ibeta_inv(a, b, prob)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("F upper quantile against Boost") {
  const std::pair<double, double> dofs[] = {{1, 1}, {2, 10}, {4, 4996}, {4, 50}, {12, 200}, {40, 9000}};
  for (const auto& [d1, d2] : dofs) {
    const boost::math::fisher_f f(d1, d2);
    for (double alpha : {0.1, 0.05, 0.01, 0.001}) {
      const double ref = boost::math::quantile(boost::math::complement(f, alpha));
      CHECK(f_upper_quantile(alpha, d1, d2) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("normal distribution functions against Boost") {
  const boost::math::normal n;
  for (double x : {-8.0, -3.0, -1.0, 0.0, 0.3, 2.5, 6.0}) {
    CHECK(normal_cdf(x) == doctest::Approx(boost::math::cdf(n, x)).epsilon(1e-12));
  }
  for (double p : {1e-10, 1e-4, 0.025, 0.5, 0.9, 0.999999}) {
    CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(n, p)).epsilon(1e-12));
  }
}

TEST_CASE("log gamma against Boost") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 10.0, 123.4, 5000.0}) {
    CHECK(log_gamma(x) == doctest::Approx(boost::math::lgamma(x)).epsilon(1e-13));
  }
}
