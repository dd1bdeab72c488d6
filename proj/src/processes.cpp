#include "lazyppl/processes.hpp"

#include <cmath>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lazyppl/errors.hpp"

namespace lazyppl {

namespace {

constexpr double kDegenerateVariance = 1e-12;
constexpr double kPsdTolerance = -1e-6;

// One-point conditioning, unrolled. For conditioned points x_1..x_n with
// k_0 = k and k_i = k_{i-1} conditioned on x_i:
//   d_i     = k_{i-1}(x_i, x_i)
//   resid_i = y_i - m_{i-1}(x_i)
//   cross_j[i] = k_{i-1}(x_i, x_j) for i < j
// and for a new point x,
//   k_{i-1}(x_i, x) = k(x_i, x) - sum_{l<i} cross_i[l] k_{l-1}(x_l, x) / d_l
//   m_n(x)   = m(x) + sum_l k_{l-1}(x_l, x) resid_l / d_l
//   k_n(x,x) = k(x, x) - sum_l k_{l-1}(x_l, x)^2 / d_l
// Pinned points (d_l <= 1e-12) contribute nothing.
class GpState {
 public:
  GpState(RealFn mean, CovFn cov, TreeHandle h)
      : mean_(std::move(mean)), cov_(std::move(cov)), h_(std::move(h)) {}

  double query(double x) {
    if (std::isnan(x)) throw InvalidParameter("gp: query at NaN");
    if (auto it = memo_.find(x); it != memo_.end()) return it->second;

    const std::size_t n = points_.size();
    std::vector<double> a(n);
    double m = mean_(x);
    double var = cov_(x, x);
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = points_[i];
      double ai = cov_(p.x, x);
      for (std::size_t l = 0; l < i; ++l) {
        if (!points_[l].pinned) ai -= p.cross[l] * a[l] / points_[l].d;
      }
      a[i] = ai;
      if (!p.pinned) {
        m += ai * p.resid / p.d;
        var -= ai * ai / p.d;
      }
    }

    if (var < kPsdTolerance) ++h_.context()->diagnostics().psd_warnings;
    const bool pinned = !(var > kDegenerateVariance);
    const double sd = pinned ? 0.0 : std::sqrt(var);
    double y = normal(m, sd).run(h_.child(n));

    points_.push_back(Point{x, y, pinned ? 0.0 : var, y - m, pinned, std::move(a)});
    memo_.emplace(x, y);
    return y;
  }

 private:
  struct Point {
    double x;
    double y;
    double d;
    double resid;
    bool pinned;
    std::vector<double> cross;
  };

  RealFn mean_;
  CovFn cov_;
  TreeHandle h_;
  std::vector<Point> points_;
  std::unordered_map<double, double> memo_;
};

}  // namespace

StickWeights::StickWeights(Stream<double> breaks)
    : breaks_(std::move(breaks)) {
  auto gen = [breaks = breaks_, rem = 1.0](std::size_t k) mutable {
    if (k == 0) return 1.0;
    rem *= 1.0 - breaks.at(k - 1);
    return rem;
  };
  remainders_ = Stream<double>(std::move(gen), Stream<double>::Access::kSequential);
}

double StickWeights::remainder(std::size_t k) const {
  return remainders_.at(k);
}

double StickWeights::weight(std::size_t k) const {
  return breaks_.at(k) * remainders_.at(k);
}

double StickWeights::cumulative(std::size_t k) const {
  return 1.0 - remainders_.at(k + 1);
}

ProbComp<PointStream> poisson_pp(double rate) {
  auto gaps = iid(exponential(rate));
  return make_prob([gaps](ProbScope& s) {
    Stream<double> steps = s(gaps);
    auto gen = [steps, sum = 0.0](std::size_t n) mutable {
      if (n > 0) sum += steps.at(n - 1);
      return sum;
    };
    return PointStream(std::move(gen), PointStream::Access::kSequential);
  });
}

ProbComp<StickWeights> stick_breaking(double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidParameter("stick_breaking: alpha must be positive");
  }
  return fmap(iid(beta(1.0, alpha)),
              [](Stream<double> rs) { return StickWeights(std::move(rs)); });
}

ProbComp<int> to_prob(const StickWeights& vs) {
  return ProbComp<int>([vs](const TreeHandle& h) {
    double u = h.read_root();
    std::size_t n = 0;
    while (!(vs.cumulative(n) > u)) ++n;
    return static_cast<int>(n);
  });
}

RealFn splice(PointStream xs, Stream<RealFn> fs) {
  return [xs = std::move(xs), fs = std::move(fs)](double x) {
    std::size_t j = 0;
    while (xs.at(j + 1) < x) ++j;
    return fs.at(j)(x);
  };
}

ProbComp<RealFn> splice_prob(ProbComp<PointStream> pp, ProbComp<RealFn> fp) {
  auto fns = iid(std::move(fp));
  return make_prob([pp = std::move(pp), fns](ProbScope& s) {
    PointStream xs = s(pp);
    Stream<RealFn> fs = s(fns);
    return splice(std::move(xs), std::move(fs));
  });
}

ProbComp<RealFn> rescale(ProbComp<RealFn> fp) {
  return fmap(std::move(fp), [](RealFn f) -> RealFn {
    return [f = std::move(f)](double x) { return f(2.0 * x); };
  });
}

CovFn rbf(double variance, double lengthscale) {
  if (!(variance > 0.0) || !(lengthscale > 0.0)) {
    throw InvalidParameter("rbf: variance and lengthscale must be positive");
  }
  return [variance, lengthscale](double x, double y) {
    double d = x - y;
    return variance * std::exp(-d * d / (2.0 * lengthscale * lengthscale));
  };
}

ProbComp<RealFn> gp(RealFn mean, CovFn cov) {
  return ProbComp<RealFn>(
      [mean = std::move(mean), cov = std::move(cov)](const TreeHandle& h) -> RealFn {
        auto state = std::make_shared<GpState>(mean, cov, h);
        return [state](double x) { return state->query(x); };
      });
}

}  // namespace lazyppl
