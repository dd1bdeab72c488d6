#ifndef LAZYPPL_MODELS_HPP_
#define LAZYPPL_MODELS_HPP_

#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lazyppl/meas.hpp"
#include "lazyppl/processes.hpp"
#include "lazyppl/prob.hpp"

namespace lazyppl {

struct Point2D {
  double x;
  double y;
};

struct Dataset2D {
  std::string name;
  std::vector<Point2D> points;
};

// CSV with header "x,y" and one decimal pair per line. Throws ParseError on
// a bad header, malformed numbers, or non-finite values.
Dataset2D parse_dataset_csv(std::istream& in, std::string name);
Dataset2D read_dataset_csv(const std::string& path);

// Nine points around a three-segment piecewise-linear curve on [0, 10]
// (copy of data/piecewise9.csv).
Dataset2D bundled_regression_dataset();
// Ten 1-D observations in three groups (copy of data/cluster1d.csv; the
// y column is the datum).
Dataset2D bundled_cluster_dataset();

// f(x) = a x + b with a, b ~ N(0, 3).
ProbComp<RealFn> linear_prior();

// Draws f from the prior and scores every datum (x, d) with the normal
// density of d around f(x).
MeasComp<RealFn> regress(double sigma, ProbComp<RealFn> prior,
                         std::vector<Point2D> dataset);

// Linear pieces spliced at the points of a Poisson process.
ProbComp<RealFn> piecewise_linear_prior(double rate = 0.2);

// A linear mean under a Gaussian process with rbf(1, 1) covariance.
ProbComp<RealFn> gp_with_linear_prior();

// Brownian motion covariance min(s, t).
CovFn wiener_cov();

// Each datum draws its parameter from one shared Dirichlet-process draw and
// is scored with likelihood(param, datum).
template <class Param, class Datum, class Likelihood>
MeasComp<std::vector<std::pair<Datum, Param>>> dp_cluster(
    double alpha, ProbComp<Param> base, Likelihood likelihood,
    std::vector<Datum> dataset) {
  auto process = dirichlet_process(alpha, std::move(base));
  return make_meas([process, likelihood, dataset = std::move(dataset)](
                       MeasScope& s) {
    ProbComp<Param> p = s.sample(process);
    Stream<Param> xs = s.sample(iid(p));
    std::vector<std::pair<Datum, Param>> tagged;
    tagged.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      tagged.emplace_back(dataset[i], xs.at(i));
    }
    for (const auto& [d, param] : tagged) s.score(likelihood(param, d));
    return tagged;
  });
}

using Position = std::pair<double, double>;

// Clusters named by uniform reals, with positions attached afterwards by
// two memoized random functions of the name.
ProbComp<ProbComp<Position>> dp_memoized_positions(double alpha);
// The same process with a two-dimensional normal base.
ProbComp<ProbComp<Position>> dp_direct_positions(double alpha);

// What the CLI extracts from one posterior sample.
struct ModelOutput {
  std::vector<double> scalars;
  RealFn fn;  // set for function-valued models
};

struct ModelOptions {
  std::optional<Dataset2D> dataset;
  std::optional<double> sigma;
  double rate = 0.2;
  double alpha = 1.0;
};

struct ModelSpec {
  std::string id;
  std::string description;
  std::string inputs;
  bool functional = false;
  std::function<std::vector<std::string>(const ModelOptions&)> columns;
  std::function<MeasComp<ModelOutput>(const ModelOptions&)> build;
};

const std::vector<ModelSpec>& model_catalog();
const ModelSpec* find_model(const std::string& id);

// x ~ bernoulli(0.5); weight 2 if x else 1. Normalized P(x) = 2/3.
MeasComp<bool> two_point_model();

// b ~ bernoulli(0.5); three normal draws if b, one otherwise; their sum
// observed at 2 with unit noise. Returns b.
MeasComp<bool> varying_sites_model();
// Exact posterior P(b) of varying_sites_model.
double varying_sites_posterior();

}  // namespace lazyppl

#endif  // LAZYPPL_MODELS_HPP_
