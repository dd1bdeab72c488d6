#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lazyppl/errors.hpp"
#include "lazyppl/inference.hpp"
#include "lazyppl/models.hpp"
#include "test_util.hpp"

using namespace lazyppl;
using testutil::mean;
using testutil::variance;

namespace {

std::vector<double> ys(const Dataset2D& d) {
  std::vector<double> out;
  for (const auto& p : d.points) out.push_back(p.y);
  return out;
}

}  // namespace

TEST_CASE("dataset parsing") {
  std::istringstream ok("x,y\n1,2.5\n-3e-1,4\n");
  auto d = parse_dataset_csv(ok, "t");
  REQUIRE(d.points.size() == 2);
  CHECK(d.points[1].x == -0.3);
  std::istringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS_AS(parse_dataset_csv(bad_header, "t"), ParseError);
  std::istringstream bad_number("x,y\n1,abc\n");
  CHECK_THROWS_AS(parse_dataset_csv(bad_number, "t"), ParseError);
  std::istringstream non_finite("x,y\n1,inf\n");
  CHECK_THROWS_AS(parse_dataset_csv(non_finite, "t"), ParseError);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/file.csv"), ParseError);

  auto file = read_dataset_csv(LAZYPPL_SOURCE_DIR "/data/piecewise9.csv");
  auto bundled = bundled_regression_dataset();
  REQUIRE(file.points.size() == bundled.points.size());
  for (std::size_t i = 0; i < file.points.size(); ++i) {
    CHECK(file.points[i].x == bundled.points[i].x);
    CHECK(file.points[i].y == bundled.points[i].y);
  }
  CHECK(ys(read_dataset_csv(LAZYPPL_SOURCE_DIR "/data/cluster1d.csv")) ==
        ys(bundled_cluster_dataset()));
}

TEST_CASE("linear prior") {
  auto store = std::make_shared<OverrideStore>();
  store->set(NodePath{0}, 0.5 + 0.5 * std::erf(1.0 / (3.0 * std::sqrt(2.0))));
  store->set(NodePath{1}, 0.5);
  auto h = TreeHandle::root(1, store);
  RealFn f = linear_prior().run(h);
  CHECK(f(2.5) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(h.context()->log().size() == 2);

  auto slopes = testutil::prior_runs(linear_prior(), 100000,
                                     [](const RealFn& g) { return g(1) - g(0); });
  CHECK(std::abs(std::sqrt(variance(slopes)) - 3.0) < 0.05);
}

TEST_CASE("regress") {
  auto empty = run_weighted(regress(0.1, linear_prior(), {}), 3);
  CHECK(empty.log_weight.value() == 0.0);

  auto on_line = make_prob([](ProbScope&) { return RealFn([](double x) { return 2 * x; }); });
  auto r = run_weighted(regress(0.5, on_line, {{1.0, 2.0}}), 1);
  CHECK(r.log_weight.value() == doctest::Approx(std::log(1.0 / (0.5 * std::sqrt(2 * M_PI)))).epsilon(1e-14));

  std::vector<Point2D> d1{{0.5, 1.0}, {1.5, 2.0}};
  std::vector<Point2D> d2{{3.0, -1.0}};
  std::vector<Point2D> both = d1;
  both.insert(both.end(), d2.begin(), d2.end());
  for (std::uint64_t s = 0; s < 20; ++s) {
    double w1 = run_weighted(regress(0.3, linear_prior(), d1), s).log_weight.value();
    double w2 = run_weighted(regress(0.3, linear_prior(), d2), s).log_weight.value();
    double w = run_weighted(regress(0.3, linear_prior(), both), s).log_weight.value();
    CHECK(w == doctest::Approx(w1 + w2).epsilon(1e-12));
  }

  CHECK_THROWS_AS(regress(0, linear_prior(), {}), InvalidParameter);
}

TEST_CASE("conjugate slope posterior") {
  auto slope_only = fmap(normal(0, 3), [](double a) { return RealFn([a](double x) { return a * x; }); });
  auto m = regress(1.0, slope_only, {{1.0, 2.0}});
  MhConfig config;
  config.steps = 200000;
  config.burn_in = 5000;
  std::vector<double> slopes;
  mh(m, KernelSpec::all_sites(0.5), config,
     [&](const Sample<RealFn>& s) { slopes.push_back(s.value(1.0)); });
  CHECK(std::abs(mean(slopes) - 1.8) < 0.05);
}

TEST_CASE("every prior runs with log weight zero") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    CHECK(run_weighted(sample(piecewise_linear_prior()), s).log_weight.value() == 0.0);
    CHECK(run_weighted(sample(gp_with_linear_prior()), s).log_weight.value() == 0.0);
    CHECK(run_weighted(sample(linear_prior()), s).log_weight.value() == 0.0);
  }
}

TEST_CASE("piecewise prior respects the laziness budget") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto h = TreeHandle::root(s);
    auto pts_h = TreeHandle::root(s);
    RealFn f = piecewise_linear_prior(0.2).run(h);
    for (int i = 0; i <= 100; ++i) f(i / 10.0);
    // Change points, read through the same tree layout as the prior.
    auto xs = poisson_pp(0.2).run(pts_h.split().first);
    std::size_t points = 0;
    while (xs.at(points + 1) <= 10.0) ++points;
    std::size_t segments = points + 1;
    CHECK(h.context()->log().size() <= 2 + points * 3 + segments * 2);
  }
}

TEST_CASE("piecewise posterior on the bundled data has change points") {
  MhConfig config;
  config.steps = 100000;
  config.burn_in = 20000;
  config.thin = 10;
  auto m = regress(0.1, piecewise_linear_prior(0.2), bundled_regression_dataset().points);
  std::size_t with_change = 0, total = 0;
  // Without change points below 9.5 the run reads 1 gap and 2 line
  // parameters; each change point adds 3 more.
  mh(m, irreducible_mix(0.1, 0.1), config, [&](const Sample<RealFn>& s) {
    ++total;
    if (s.sites >= 6) ++with_change;
  });
  CHECK(static_cast<double>(with_change) / total > 0.5);
}

TEST_CASE("gp with linear mean") {
  auto vals = testutil::prior_runs(gp_with_linear_prior(), 20000,
                                   [](const RealFn& f) { return f(1.0); });
  CHECK(std::abs(mean(vals)) < 0.1);
  CHECK(std::abs(variance(vals) / 19.0 - 1.0) < 0.05);

  RealFn f = gp_with_linear_prior().run(TreeHandle::root(2));
  double y = f(0.4);
  CHECK(f(0.4) == y);
}

TEST_CASE("gp regression fits the bundled data") {
  MhConfig config;
  config.steps = 60000;
  config.burn_in = 30000;
  config.thin = 100;
  auto data = bundled_regression_dataset().points;
  auto m = regress(0.3, gp_with_linear_prior(), data);
  std::vector<double> rms;
  mh(m, irreducible_mix(0.1, 0.1), config, [&](const Sample<RealFn>& s) {
    double acc = 0;
    for (const auto& p : data) acc += (s.value(p.x) - p.y) * (s.value(p.x) - p.y);
    rms.push_back(std::sqrt(acc / data.size()));
  });
  CHECK(mean(rms) <= 0.6);
}

TEST_CASE("dp cluster: tiny alpha puts everything at one table") {
  auto data = ys(bundled_cluster_dataset());
  auto m = dp_cluster(0.01, normal(0, 3), [](double mu, double y) { return normal_pdf(mu, 0.5, y); }, data);
  int single = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    auto tagged = run_weighted(m, s).result;
    std::set<double> params;
    for (const auto& [d, p] : tagged) params.insert(p);
    if (params.size() == 1) ++single;
  }
  CHECK(single / 2000.0 > 0.95);
}

TEST_CASE("dp cluster with one datum reduces to the base posterior") {
  auto m = dp_cluster(1.0, normal(0, 3), [](double mu, double y) { return normal_pdf(mu, 0.5, y); },
                      std::vector<double>{1.0});
  MhConfig config;
  config.steps = 200000;
  config.burn_in = 10000;
  std::vector<double> mus;
  mh(m, irreducible_mix(0.1, 0.3), config, [&](const auto& s) { mus.push_back(s.value[0].second); });
  // Prior N(0, 9), one observation with variance 0.25.
  double post_var = 1.0 / (1.0 / 9.0 + 4.0);
  CHECK(std::abs(mean(mus) - post_var * 4.0) < 0.05);
  CHECK(std::abs(std::sqrt(variance(mus)) - std::sqrt(post_var)) < 0.05);
}

TEST_CASE("memoized positions have the law of a two-dimensional base") {
  auto draw = [](const ProbComp<ProbComp<Position>>& process) {
    return make_prob([process](ProbScope& s) {
      ProbComp<Position> p = s(process);
      Stream<Position> xs = s(iid(p));
      return std::array<double, 4>{xs.at(0).first, xs.at(0).second, xs.at(1).first,
                                   xs.at(1).second};
    });
  };
  constexpr std::size_t n = 10000;
  std::vector<std::array<double, 4>> a, b;
  for (std::uint64_t s = 0; s < n; ++s) {
    a.push_back(draw(dp_memoized_positions(1.0)).run(TreeHandle::root(s)));
    b.push_back(draw(dp_direct_positions(1.0)).run(TreeHandle::root(s + n)));
  }
  auto col = [](const auto& v, int j) {
    std::vector<double> out;
    for (const auto& r : v) out.push_back(r[j]);
    return out;
  };
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(mean(col(a, j)) - mean(col(b, j))) < 3 * std::sqrt(2 * 9.0 / n));
  }
  // Variances 9; covariance across draws 9 P(same cluster) = 4.5.
  for (auto [i, j] : {std::pair{0, 0}, std::pair{0, 2}, std::pair{1, 3}, std::pair{0, 1}}) {
    double ca = testutil::covariance(col(a, i), col(a, j));
    double cb = testutil::covariance(col(b, i), col(b, j));
    CHECK(std::abs(ca - cb) < 3 * std::sqrt(2.0) * 9.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("catalog") {
  const auto& cat = model_catalog();
  CHECK(cat.front().id == "two-point");
  CHECK(find_model("gp-regression") != nullptr);
  CHECK(find_model("missing") == nullptr);
  CHECK(varying_sites_posterior() == doctest::Approx(0.5383).epsilon(1e-3));
}
