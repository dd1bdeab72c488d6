#ifndef LAZYPPL_DIAGNOSTICS_HPP_
#define LAZYPPL_DIAGNOSTICS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lazyppl::diag {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sd(std::span<const double> xs);

// Linear interpolation between order statistics (R type 7).
double quantile(std::span<const double> xs, double q);

// rho_1 .. rho_max_lag; a constant series has all autocorrelations 0.
std::vector<double> autocorrelation(std::span<const double> xs,
                                    std::size_t max_lag);

// n / (1 + 2 sum rho_k), summing Geyer's initial positive sequence of
// paired autocorrelations. A constant series has ESS n.
double effective_sample_size(std::span<const double> xs);

inline constexpr std::array<double, 5> kQuantileLevels{0.05, 0.25, 0.5, 0.75,
                                                      0.95};

struct ColumnSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::array<double, 5> quantiles{};
  std::vector<double> autocorrelation;
  double ess = 0.0;
};

ColumnSummary summarize(std::span<const double> xs, std::size_t max_lag = 50);

}  // namespace lazyppl::diag

#endif  // LAZYPPL_DIAGNOSTICS_HPP_
