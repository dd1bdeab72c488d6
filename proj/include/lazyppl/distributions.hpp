#ifndef LAZYPPL_DISTRIBUTIONS_HPP_
#define LAZYPPL_DISTRIBUTIONS_HPP_

#include <span>

namespace lazyppl::dist {

// Inverse standard normal CDF. Rational approximation refined by one Halley
// step; absolute error well below 1e-9 on (0, 1). Endpoints are nudged
// inward so the result is always finite.
double normal_quantile(double u);

double normal_cdf(double x);

// -ln(1 - u) / rate.
double exponential_quantile(double rate, double u);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double a, double b, double x);

// Closed form when a == 1, otherwise bisection on beta_cdf to 1e-12.
double beta_quantile(double a, double b, double u);

// Least i with u * sum(weights) < weights[0] + ... + weights[i].
int categorical_index(std::span<const double> weights, double u);

}  // namespace lazyppl::dist

#endif  // LAZYPPL_DISTRIBUTIONS_HPP_
