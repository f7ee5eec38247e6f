#pragma once

namespace owma {

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
// Solves I_x(a, b) = prob for x in [0, 1].
double incomplete_beta_inverse(double a, double b, double prob);

// Upper alpha critical value of F(d1, d2): P(F > value) = alpha.
double f_upper_quantile(double alpha, double d1, double d2);

double normal_cdf(double x);
double normal_quantile(double prob);

double log_gamma(double x);

}  // namespace owma
