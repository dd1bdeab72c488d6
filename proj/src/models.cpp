#include "lazyppl/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "lazyppl/errors.hpp"

namespace lazyppl {

namespace {

constexpr const char* kRegressionCsv =
    "x,y\n"
    "0.500,1.321\n"
    "1.625,1.855\n"
    "2.750,2.545\n"
    "3.875,2.828\n"
    "5.000,2.214\n"
    "6.125,1.298\n"
    "7.250,0.828\n"
    "8.375,1.522\n"
    "9.500,2.225\n";

constexpr const char* kClusterCsv =
    "x,y\n"
    "0,-2.100\n"
    "1,-1.800\n"
    "2,-2.400\n"
    "3,-2.000\n"
    "4,0.200\n"
    "5,-0.100\n"
    "6,0.300\n"
    "7,2.200\n"
    "8,1.900\n"
    "9,2.500\n";

double parse_number(std::string_view token, std::size_t line) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw ParseError("dataset line " + std::to_string(line) + ": bad number '" +
                     std::string(token) + "'");
  }
  return value;
}

Dataset2D parse_string(const char* text, std::string name) {
  std::istringstream in(text);
  return parse_dataset_csv(in, std::move(name));
}

std::vector<std::string> no_columns(const ModelOptions&) { return {}; }

MeasComp<ModelOutput> scalar_output(MeasComp<double> m) {
  return bind(std::move(m), [](double v) {
    return pure_meas(ModelOutput{{v}, {}});
  });
}

MeasComp<ModelOutput> bool_output(MeasComp<bool> m) {
  return bind(std::move(m), [](bool v) {
    return pure_meas(ModelOutput{{v ? 1.0 : 0.0}, {}});
  });
}

MeasComp<ModelOutput> fn_output(MeasComp<RealFn> m) {
  return bind(std::move(m), [](RealFn f) {
    return pure_meas(ModelOutput{{}, std::move(f)});
  });
}

std::vector<Point2D> regression_data(const ModelOptions& o) {
  return o.dataset ? o.dataset->points : bundled_regression_dataset().points;
}

std::vector<double> cluster_data(const ModelOptions& o) {
  Dataset2D d = o.dataset ? *o.dataset : bundled_cluster_dataset();
  std::vector<double> ys;
  for (const auto& p : d.points) ys.push_back(p.y);
  return ys;
}

MeasComp<ModelOutput> cluster_output(const ModelOptions& o) {
  auto m = dp_cluster(
      o.alpha, normal(0.0, 3.0),
      [](double param, double datum) { return normal_pdf(param, 0.5, datum); },
      cluster_data(o));
  return bind(std::move(m), [](std::vector<std::pair<double, double>> tagged) {
    ModelOutput out;
    std::set<double> distinct;
    for (const auto& t : tagged) distinct.insert(t.second);
    out.scalars.push_back(static_cast<double>(distinct.size()));
    for (const auto& t : tagged) out.scalars.push_back(t.second);
    return pure_meas(std::move(out));
  });
}

}  // namespace

Dataset2D parse_dataset_csv(std::istream& in, std::string name) {
  Dataset2D out{std::move(name), {}};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y") throw ParseError("dataset: header must be 'x,y'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("dataset line " + std::to_string(lineno) +
                       ": expected two comma-separated fields");
    }
    std::string_view view(line);
    out.points.push_back({parse_number(view.substr(0, comma), lineno),
                          parse_number(view.substr(comma + 1), lineno)});
  }
  return out;
}

Dataset2D read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("dataset: cannot open '" + path + "'");
  return parse_dataset_csv(in, path);
}

Dataset2D bundled_regression_dataset() {
  return parse_string(kRegressionCsv, "piecewise9");
}

Dataset2D bundled_cluster_dataset() {
  return parse_string(kClusterCsv, "cluster1d");
}

ProbComp<RealFn> linear_prior() {
  return make_prob([](ProbScope& s) -> RealFn {
    double a = s(normal(0.0, 3.0));
    double b = s(normal(0.0, 3.0));
    return [a, b](double x) { return a * x + b; };
  });
}

MeasComp<RealFn> regress(double sigma, ProbComp<RealFn> prior,
                         std::vector<Point2D> dataset) {
  if (!(sigma > 0.0)) throw InvalidParameter("regress: sigma must be positive");
  return make_meas([sigma, prior = std::move(prior),
                    dataset = std::move(dataset)](MeasScope& s) {
    RealFn f = s.sample(prior);
    for (const auto& [x, d] : dataset) s.score_log(normal_log_pdf(f(x), sigma, d));
    return f;
  });
}

ProbComp<RealFn> piecewise_linear_prior(double rate) {
  return splice_prob(poisson_pp(rate), linear_prior());
}

ProbComp<RealFn> gp_with_linear_prior() {
  CovFn k = rbf(1.0, 1.0);
  return make_prob([k](ProbScope& s) {
    RealFn mean = s(linear_prior());
    return s(gp(mean, k));
  });
}

CovFn wiener_cov() {
  return [](double s, double t) { return std::min(s, t); };
}

ProbComp<ProbComp<Position>> dp_memoized_positions(double alpha) {
  auto process = dirichlet_process(alpha, uniform());
  auto coord = memoize_keyed<double>([](const double&) { return normal(0.0, 3.0); });
  return make_prob([process, coord](ProbScope& s) {
    ProbComp<double> names = s(process);
    auto xpos = s(coord);
    auto ypos = s(coord);
    return fmap(names, [xpos, ypos](double r) { return Position{xpos(r), ypos(r)}; });
  });
}

ProbComp<ProbComp<Position>> dp_direct_positions(double alpha) {
  auto base = make_prob([](ProbScope& s) {
    double x = s(normal(0.0, 3.0));
    double y = s(normal(0.0, 3.0));
    return Position{x, y};
  });
  return dirichlet_process(alpha, base);
}

MeasComp<bool> two_point_model() {
  return make_meas([](MeasScope& s) {
    bool x = s.sample(bernoulli(0.5));
    s.score(x ? 2.0 : 1.0);
    return x;
  });
}

MeasComp<bool> varying_sites_model() {
  return make_meas([](MeasScope& s) {
    bool b = s.sample(bernoulli(0.5));
    int draws = b ? 3 : 1;
    double total = 0.0;
    for (int i = 0; i < draws; ++i) total += s.sample(normal(0.0, 1.0));
    s.score(normal_pdf(total, 1.0, 2.0));
    return b;
  });
}

double varying_sites_posterior() {
  // Marginal densities of the observation: N(2; 0, 4) and N(2; 0, 2).
  double with = normal_pdf(0.0, 2.0, 2.0);
  double without = normal_pdf(0.0, std::numbers::sqrt2, 2.0);
  return with / (with + without);
}

const std::vector<ModelSpec>& model_catalog() {
  static const std::vector<ModelSpec> catalog = [] {
    std::vector<ModelSpec> c;
    c.push_back({"two-point", "bernoulli(0.5) coin weighted 2:1 towards true",
                 "none", false,
                 [](const ModelOptions&) { return std::vector<std::string>{"x"}; },
                 [](const ModelOptions&) { return bool_output(two_point_model()); }});
    c.push_back({"varying-sites",
                 "latent boolean choosing 3 or 1 normal draws, sum observed at 2",
                 "none", false,
                 [](const ModelOptions&) { return std::vector<std::string>{"b"}; },
                 [](const ModelOptions&) { return bool_output(varying_sites_model()); }});
    c.push_back({"normal-normal", "theta ~ N(0,1), one observation 2 with unit noise",
                 "none", false,
                 [](const ModelOptions&) { return std::vector<std::string>{"theta"}; },
                 [](const ModelOptions&) {
                   return scalar_output(make_meas([](MeasScope& s) {
                     double theta = s.sample(normal(0.0, 1.0));
                     s.score(normal_pdf(theta, 1.0, 2.0));
                     return theta;
                   }));
                 }});
    c.push_back({"beta-bernoulli", "theta ~ uniform, 7 successes and 3 failures",
                 "none", false,
                 [](const ModelOptions&) { return std::vector<std::string>{"theta"}; },
                 [](const ModelOptions&) {
                   return scalar_output(make_meas([](MeasScope& s) {
                     double theta = s.sample(beta(1.0, 1.0));
                     for (int i = 0; i < 7; ++i) s.score(theta);
                     for (int i = 0; i < 3; ++i) s.score(1.0 - theta);
                     return theta;
                   }));
                 }});
    c.push_back({"linear-regression", "random line a x + b, a, b ~ N(0,3)",
                 "dataset (x,y CSV; default bundled piecewise9), sigma (0.1)", true,
                 no_columns, [](const ModelOptions& o) {
                   return fn_output(regress(o.sigma.value_or(0.1), linear_prior(),
                                            regression_data(o)));
                 }});
    c.push_back({"piecewise-regression",
                 "linear pieces spliced at Poisson change points",
                 "dataset (default bundled piecewise9), sigma (0.1), rate (0.2)", true,
                 no_columns, [](const ModelOptions& o) {
                   return fn_output(regress(o.sigma.value_or(0.1),
                                            piecewise_linear_prior(o.rate),
                                            regression_data(o)));
                 }});
    c.push_back({"gp-regression", "Gaussian process rbf(1,1) around a random line",
                 "dataset (default bundled piecewise9), sigma (0.3)", true, no_columns,
                 [](const ModelOptions& o) {
                   return fn_output(regress(o.sigma.value_or(0.3),
                                            gp_with_linear_prior(),
                                            regression_data(o)));
                 }});
    c.push_back({"dp-cluster",
                 "Dirichlet-process mixture of N(mu, 0.5), mu ~ N(0,3)",
                 "dataset (y column; default bundled cluster1d), alpha (1)", false,
                 [](const ModelOptions& o) {
                   std::vector<std::string> cols{"clusters"};
                   std::size_t n = cluster_data(o).size();
                   for (std::size_t i = 0; i < n; ++i) {
                     cols.push_back("param_" + std::to_string(i));
                   }
                   return cols;
                 },
                 cluster_output});
    return c;
  }();
  return catalog;
}

const ModelSpec* find_model(const std::string& id) {
  for (const auto& m : model_catalog()) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

}  // namespace lazyppl
