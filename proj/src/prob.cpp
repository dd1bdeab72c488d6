#include "lazyppl/prob.hpp"

#include <cmath>
#include <string>

#include "lazyppl/distributions.hpp"

namespace lazyppl {

ProbComp<double> uniform() {
  return ProbComp<double>([](const TreeHandle& h) { return h.read_root(); });
}

ProbComp<double> normal(double mu, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw InvalidParameter("normal: need finite mu and sigma >= 0, got sigma " +
                           std::to_string(sigma));
  }
  return ProbComp<double>([mu, sigma](const TreeHandle& h) {
    double z = dist::normal_quantile(h.read_root());
    return sigma == 0.0 ? mu : mu + sigma * z;
  });
}

ProbComp<double> exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidParameter("exponential: rate must be positive");
  }
  return ProbComp<double>([rate](const TreeHandle& h) {
    return dist::exponential_quantile(rate, h.read_root());
  });
}

ProbComp<double> beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidParameter("beta: shape parameters must be positive");
  }
  return ProbComp<double>([a, b](const TreeHandle& h) {
    return dist::beta_quantile(a, b, h.read_root());
  });
}

ProbComp<bool> bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("bernoulli: p must lie in [0,1]");
  }
  return ProbComp<bool>([p](const TreeHandle& h) { return h.read_root() < p; });
}

ProbComp<int> categorical(std::vector<double> weights) {
  if (weights.empty()) throw InvalidParameter("categorical: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidParameter("categorical: weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidParameter("categorical: weights sum to 0");
  return ProbComp<int>([ws = std::move(weights)](const TreeHandle& h) {
    return dist::categorical_index(ws, h.read_root());
  });
}

}  // namespace lazyppl
