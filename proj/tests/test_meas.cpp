#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lazyppl/errors.hpp"
#include "lazyppl/inference.hpp"
#include "lazyppl/meas.hpp"
#include "test_util.hpp"

using namespace lazyppl;

TEST_CASE("log weights") {
  CHECK(LogWeight{}.value() == 0.0);
  CHECK(LogWeight::from_weight(0).is_zero());
  CHECK((LogWeight::zero() + LogWeight::from_log(5)).is_zero());
  CHECK_THROWS_AS(LogWeight::from_weight(-1), InvalidScore);
  CHECK_THROWS_AS(LogWeight::from_weight(std::nan("")), InvalidScore);
  CHECK_THROWS_AS(LogWeight::from_log(std::nan("")), InvalidScore);
}

TEST_CASE("sample lifts prob computations") {
  auto r = run_weighted(sample(pure(4)), 1);
  CHECK(r.result == 4);
  CHECK(r.log_weight.value() == 0.0);

  auto p = bind(uniform(), [](double u) { return normal(u, 1); });
  auto lifted = bind(sample(uniform()), [](double u) { return sample(normal(u, 1)); });
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto a = run_weighted(sample(p), s);
    auto b = run_weighted(lifted, s);
    CHECK(a.result == b.result);
    CHECK(a.log_weight == b.log_weight);
  }

  auto u = run_weighted(sample(uniform()), 3);
  CHECK(u.access.size() == 1);
  CHECK(u.log_weight.value() == 0.0);
}

TEST_CASE("score algebra") {
  CHECK(run_weighted(score(1), 1).log_weight.value() == 0.0);
  auto six = run_weighted(bind(score(2), [](Unit) { return score(3); }), 1);
  CHECK(six.log_weight.value() == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  CHECK(run_weighted(score(0), 1).log_weight.is_zero());
  CHECK_THROWS_AS(score(-1), InvalidScore);

  auto m = bind(score(0.5), [](Unit) { return pure_meas(42); });
  auto r = run_weighted(m, 1);
  CHECK(r.result == 42);
  CHECK(r.log_weight.value() == std::log(0.5));
  CHECK(r.access.size() == 0);
}

TEST_CASE("random score interleavings sum in order") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.01, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> rs(1 + rng() % 8);
    for (auto& r : rs) r = w(rng);
    auto m = make_meas([rs](MeasScope& s) {
      double acc = 0;
      for (double r : rs) {
        acc += s.sample(uniform());
        s.score(r);
      }
      return acc;
    });
    double expect = 0.0;
    for (double r : rs) expect += std::log(r);
    CHECK(std::abs(run_weighted(m, trial).log_weight.value() - expect) < 1e-12);
  }
}

TEST_CASE("forced branch and density at the mode") {
  auto store = std::make_shared<OverrideStore>();
  store->set(NodePath{}, 0.9);
  auto r = run_weighted(sample(bernoulli(0.5)), 1, store);
  CHECK(r.result == false);

  auto m = bind(sample(normal(0, 1)), [](double x) { return score(normal_pdf(x, 1, x)); });
  CHECK(run_weighted(m, 5).log_weight.value() ==
        std::log(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("normal_pdf") {
  CHECK(normal_pdf(0, 1, 0) == doctest::Approx(0.398942280401433).epsilon(1e-14));
  CHECK(normal_pdf(2, 3, 5) / normal_pdf(2, 3, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(normal_pdf(0, 1, 1.7) == normal_pdf(0, 1, -1.7));
  CHECK(normal_log_pdf(1, 2, 0.5) == doctest::Approx(std::log(normal_pdf(1, 2, 0.5))));
}

TEST_CASE("run errors carry the partial access log") {
  auto m = make_meas([](MeasScope& s) -> double {
    s.sample(uniform());
    throw std::runtime_error("boom");
  });
  try {
    run_weighted(m, 1);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.partial_log().size() == 1);
  }
}

TEST_CASE("lwis") {
  auto constant = bind(score(1), [](Unit) { return pure_meas(5); });
  auto s = lwis(100, constant, 1);
  for (int i = 0; i < 20; ++i) CHECK(s.next() == 5);

  auto two_point = bind(sample(bernoulli(0.5)), [](bool x) {
    return bind(score(x ? 2.0 : 1.0), [x](Unit) { return pure_meas(x); });
  });
  auto stream = lwis(100000, two_point, 2);
  double hits = 0;
  for (int i = 0; i < 100000; ++i) hits += stream.next() ? 1 : 0;
  CHECK(std::abs(hits / 100000 - 2.0 / 3.0) < 0.01);

  std::vector<Weighted<int>> runs{{1, LogWeight::from_weight(3)}, {2, LogWeight::zero()}};
  LwisStream<int> only_first(runs, 1);
  for (int i = 0; i < 100; ++i) CHECK(only_first.next() == 1);

  std::vector<Weighted<int>> dead{{1, LogWeight::zero()}};
  CHECK_THROWS_AS(LwisStream<int>(dead, 1), DegenerateMeasure);
}

TEST_CASE("serial and parallel weighted runs agree exactly") {
  auto m = make_meas([](MeasScope& s) {
    double x = s.sample(normal(0, 1));
    s.score(normal_pdf(x, 1, 0.3));
    return x;
  });
  auto a = weighted_runs_serial(m, 2000, 9);
  auto b = weighted_runs_parallel(m, 2000, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].log_weight == b[i].log_weight);
  }
}
