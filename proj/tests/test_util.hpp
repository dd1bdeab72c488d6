#ifndef LAZYPPL_TEST_UTIL_HPP_
#define LAZYPPL_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "lazyppl/meas.hpp"
#include "lazyppl/prob.hpp"
#include "lazyppl/sample_tree.hpp"

namespace testutil {

// One prior run per seed 1..n.
template <class A, class F>
std::vector<double> prior_runs(const lazyppl::ProbComp<A>& p, std::size_t n,
                               F stat, std::uint64_t salt = 0) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto h = lazyppl::TreeHandle::root(lazyppl::derive_seed(salt, i + 1));
    out.push_back(stat(p.run(h)));
  }
  return out;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  double m = mean(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline double covariance(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  double mx = mean(xs), my = mean(ys), s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
  return s / static_cast<double>(xs.size() - 1);
}

inline double correlation(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  return covariance(xs, ys) / std::sqrt(variance(xs) * variance(ys));
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// A handle whose root node is forced to u.
inline lazyppl::TreeHandle forced_root(double u, std::uint64_t seed = 1) {
  auto store = std::make_shared<lazyppl::OverrideStore>();
  store->set(lazyppl::NodePath{}, u);
  return lazyppl::TreeHandle::root(seed, store);
}

}  // namespace testutil

#endif  // LAZYPPL_TEST_UTIL_HPP_
