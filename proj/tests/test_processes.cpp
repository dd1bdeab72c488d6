#include <cmath>
#include <set>

#include "doctest.h"
#include "lazyppl/errors.hpp"
#include "lazyppl/models.hpp"
#include "lazyppl/processes.hpp"
#include "test_util.hpp"

using namespace lazyppl;
using testutil::mean;
using testutil::prior_runs;
using testutil::variance;

namespace {

std::size_t count_in(const PointStream& xs, double t) {
  std::size_t n = 0;
  while (xs.at(n + 1) <= t) ++n;
  return n;
}

RealFn constant(double c) {
  return [c](double) { return c; };
}

}  // namespace

TEST_CASE("poisson process") {
  auto h = TreeHandle::root(1);
  CHECK(poisson_pp(1).run(h).at(0) == 0.0);

  auto store = std::make_shared<OverrideStore>();
  for (std::uint64_t i = 0; i < 3; ++i) {
    store->set(NodePath{0, i}, -std::expm1(-static_cast<double>(i + 1)));
  }
  auto xs = poisson_pp(1).run(TreeHandle::root(1, store));
  CHECK(xs.at(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xs.at(2) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(xs.at(3) == doctest::Approx(6.0).epsilon(1e-12));

  auto counts = prior_runs(poisson_pp(0.7), 20000,
                           [](const PointStream& s) { return static_cast<double>(count_in(s, 10)); });
  CHECK(std::abs(mean(counts) - 7.0) < 0.15);
  CHECK(std::abs(variance(counts) - 7.0) < 0.5);
}

TEST_CASE("stick breaking") {
  auto store = std::make_shared<OverrideStore>();
  for (std::uint64_t i = 0; i < 10; ++i) store->set(NodePath{i}, 0.5);
  auto vs = stick_breaking(1).run(TreeHandle::root(1, store));
  CHECK(vs.weight(0) == 0.5);
  CHECK(vs.weight(1) == 0.25);
  CHECK(vs.weight(2) == 0.125);

  auto v0 = prior_runs(stick_breaking(2), 100000, [](const StickWeights& w) { return w.weight(0); });
  CHECK(std::abs(mean(v0) - 1.0 / 3.0) < 0.01);

  auto rem = prior_runs(stick_breaking(2), 20000, [](const StickWeights& w) {
    double last = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
      double c = w.cumulative(k);
      if (c > 1.0 || c < last) return -1.0;
      last = c;
    }
    return w.remainder(100);
  });
  for (double r : rem) CHECK(r >= 0.0);
  // (2/3)^100 is about 2.5e-18; the empirical mean is dominated by that scale.
  CHECK(mean(rem) < 1e-12);
  CHECK_THROWS_AS(stick_breaking(0), InvalidParameter);
}

TEST_CASE("to_prob") {
  auto ones = std::make_shared<OverrideStore>();
  ones->set(NodePath{0}, 1.0 - 0x1.0p-53);
  auto sticks1 = stick_breaking(1).run(TreeHandle::root(1, ones));
  // First break forced to ~1 puts all mass on stick 0.
  auto zeros = prior_runs(to_prob(sticks1), 1000, [](int i) { return static_cast<double>(i); });
  CHECK(mean(zeros) == 0.0);

  auto half = std::make_shared<OverrideStore>();
  half->set(NodePath{0}, 0.5);
  half->set(NodePath{1}, 1.0 - 0x1.0p-53);
  auto sticks = stick_breaking(1).run(TreeHandle::root(1, half));
  CHECK(to_prob(sticks).run(testutil::forced_root(0.75)) == 1);

  // Fixed weights (0.2, 0.3, 0.5) from breaks (0.2, 0.375, 1).
  auto fixed = std::make_shared<OverrideStore>();
  fixed->set(NodePath{0}, 0.2);
  fixed->set(NodePath{1}, 0.375);
  fixed->set(NodePath{2}, 1.0 - 0x1.0p-53);
  auto ws = stick_breaking(1).run(TreeHandle::root(1, fixed));
  auto idx = prior_runs(to_prob(ws), 100000, [](int i) { return static_cast<double>(i); });
  std::vector<double> freq(3, 0.0);
  for (double i : idx) freq[static_cast<int>(i)] += 1.0 / idx.size();
  CHECK(std::abs(freq[0] - 0.2) < 0.01);
  CHECK(std::abs(freq[1] - 0.3) < 0.01);
  CHECK(std::abs(freq[2] - 0.5) < 0.01);
}

TEST_CASE("dirichlet process") {
  auto inner_draws = [](double alpha, std::size_t k) {
    return make_prob([alpha, k](ProbScope& s) {
      ProbComp<double> p = s(dirichlet_process(alpha, normal(0, 1)));
      Stream<double> xs = s(iid(p));
      return xs.take(k);
    });
  };
  auto draws = inner_draws(0.5, 30).run(TreeHandle::root(4));
  std::set<double> atoms(draws.begin(), draws.end());
  CHECK(atoms.size() < draws.size());

  auto dup = prior_runs(inner_draws(50, 20), 2000, [](const std::vector<double>& xs) {
    std::set<double> u(xs.begin(), xs.end());
    return static_cast<double>(xs.size() - u.size()) / xs.size();
  });
  CHECK(mean(dup) < 0.25);

  auto store = std::make_shared<OverrideStore>();
  store->set(NodePath{0, 0, 0}, 1.0 - 0x1.0p-53);
  auto first = inner_draws(1, 10).run(TreeHandle::root(8, store));
  for (double x : first) CHECK(x == first[0]);
}

TEST_CASE("splice") {
  std::vector<double> pts{0, 1, 3};
  PointStream xs([pts](std::size_t n) { return n < pts.size() ? pts[n] : 1e300; });
  Stream<RealFn> fs([](std::size_t j) { return constant(static_cast<double>(j)); });
  RealFn f = splice(xs, fs);
  CHECK(f(0.5) == 0);
  CHECK(f(2) == 1);
  CHECK(fs.forced() == 2);
  CHECK(f(5) == 2);
  CHECK(fs.forced() == 3);

  std::vector<double> far{0, 100};
  RealFn g = splice(PointStream([far](std::size_t n) { return n < 2 ? far[n] : 1e300; }), fs);
  CHECK(g(7) == 0);
}

TEST_CASE("splice_prob reads grow with points, not grid size") {
  // k change points in [0, 10] force k + 1 gaps and at most k + 1 lines of
  // two parameters each, whatever the grid.
  auto prior = piecewise_linear_prior(0.2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto xs = poisson_pp(0.2).run(TreeHandle::root(seed).split().first);
    std::size_t k = count_in(xs, 10.0);
    for (int n : {11, 1001, 100001}) {
      auto h = TreeHandle::root(seed);
      RealFn f = prior.run(h);
      for (int i = 0; i < n; ++i) f(10.0 * i / (n - 1));
      CHECK(h.context()->log().size() <= 3 * (k + 1));
    }
  }
}

TEST_CASE("rescale") {
  auto id = pure(RealFn([](double x) { return x; }));
  CHECK(rescale(id).run(TreeHandle::root(1))(3) == 6);
}

TEST_CASE("rbf") {
  auto k = rbf(2, 1);
  CHECK(k(0.3, 0.3) == 2);
  CHECK(k(0.1, 0.7) == k(0.7, 0.1));
  CHECK(rbf(1, 1)(0, 1) == doctest::Approx(0.60653066).epsilon(1e-8));
}

TEST_CASE("gaussian process") {
  auto wiener = gp(constant(0), wiener_cov());
  auto h = TreeHandle::root(3);
  RealFn f = wiener.run(h);
  CHECK(f(0) == 0.0);
  double y = f(1.5);
  CHECK(f(1.5) == y);

  std::vector<double> a, b;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    RealFn w = wiener.run(TreeHandle::root(s));
    a.push_back(w(1));
    b.push_back(w(2));
  }
  CHECK(std::abs(variance(a) - 1) < 0.03);
  CHECK(std::abs(variance(b) - 2) < 0.06);
  CHECK(std::abs(testutil::covariance(a, b) - 1) < 0.05);

  // Query order does not change the law of f(1).
  std::vector<double> forward, backward;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    RealFn w = wiener.run(TreeHandle::root(s));
    forward.push_back(w(1));
    RealFn v = wiener.run(TreeHandle::root(s + 100000));
    v(2);
    v(0.5);
    backward.push_back(v(1));
  }
  CHECK(testutil::ks_distance(forward, backward) < 0.02);
}
