#include "lazyppl/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace lazyppl::diag {

namespace {

// Lag-k autocovariance with the 1/n normalization.
double autocovariance(std::span<const double> xs, double m, std::size_t k) {
  const std::size_t n = xs.size();
  double acc = 0.0;
  for (std::size_t i = 0; i + k < n; ++i) acc += (xs[i] - m) * (xs[i + k] - m);
  return acc / static_cast<double>(n);
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> autocorrelation(std::span<const double> xs,
                                    std::size_t max_lag) {
  const std::size_t lags = xs.empty() ? 0 : std::min(max_lag, xs.size() - 1);
  std::vector<double> out(lags, 0.0);
  double m = mean(xs);
  double c0 = autocovariance(xs, m, 0);
  if (c0 <= 0.0) return out;
  for (std::size_t k = 1; k <= lags; ++k) {
    out[k - 1] = autocovariance(xs, m, k) / c0;
  }
  return out;
}

double effective_sample_size(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return static_cast<double>(n);
  double m = mean(xs);
  double c0 = autocovariance(xs, m, 0);
  if (c0 <= 0.0) return static_cast<double>(n);

  // Pairs (rho_{2t}, rho_{2t+1}) with rho_0 = 1, summed while positive.
  double tau = -1.0;
  for (std::size_t t = 0; 2 * t + 1 < n; ++t) {
    double even = t == 0 ? 1.0 : autocovariance(xs, m, 2 * t) / c0;
    double odd = autocovariance(xs, m, 2 * t + 1) / c0;
    double pair = even + odd;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n) + 10.0));
  return static_cast<double>(n) / tau;
}

ColumnSummary summarize(std::span<const double> xs, std::size_t max_lag) {
  ColumnSummary s;
  s.n = xs.size();
  s.mean = mean(xs);
  s.sd = sd(xs);
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
    s.quantiles[i] = quantile(xs, kQuantileLevels[i]);
  }
  s.autocorrelation = autocorrelation(xs, max_lag);
  s.ess = effective_sample_size(xs);
  return s;
}

}  // namespace lazyppl::diag
