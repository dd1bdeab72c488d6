#ifndef LAZYPPL_PROCESSES_HPP_
#define LAZYPPL_PROCESSES_HPP_

#include <cstddef>
#include <functional>
#include <memory>

#include "lazyppl/prob.hpp"

namespace lazyppl {

// Points of a Poisson process, anchored at 0: element 0 is 0.0 and element
// n > 0 is the sum of the first n exponential gaps.
using PointStream = Stream<double>;

using CovFn = std::function<double(double, double)>;

// Dirichlet-process stick weights v_k = r_k * prod_{i<k} (1 - r_i).
class StickWeights {
 public:
  explicit StickWeights(Stream<double> breaks);

  double weight(std::size_t k) const;
  // prod_{i<k} (1 - r_i); remainder(0) == 1.
  double remainder(std::size_t k) const;
  // v_0 + ... + v_k, evaluated as 1 - remainder(k + 1) so it never
  // exceeds 1.
  double cumulative(std::size_t k) const;

  const Stream<double>& breaks() const { return breaks_; }
  std::size_t forced() const { return remainders_.forced(); }

 private:
  Stream<double> breaks_;
  Stream<double> remainders_;
};

ProbComp<PointStream> poisson_pp(double rate);

ProbComp<StickWeights> stick_breaking(double alpha);

// Least n whose cumulative weight exceeds one uniform draw.
ProbComp<int> to_prob(const StickWeights& vs);

template <class A>
ProbComp<ProbComp<A>> dirichlet_process(double alpha, ProbComp<A> base) {
  auto sticks = stick_breaking(alpha);
  return make_prob([sticks, base = std::move(base)](ProbScope& s) {
    StickWeights vs = s(sticks);
    Stream<A> atoms = s(iid(base));
    ProbComp<int> index = to_prob(vs);
    return ProbComp<A>([index, atoms](const TreeHandle& h) {
      return atoms.at(static_cast<std::size_t>(index.run(h)));
    });
  });
}

// f(x) = fs[j](x), j = number of points of `xs` (after the 0 anchor) that
// lie strictly below x.
RealFn splice(PointStream xs, Stream<RealFn> fs);

ProbComp<RealFn> splice_prob(ProbComp<PointStream> pp, ProbComp<RealFn> fp);

// x -> f(2x)
ProbComp<RealFn> rescale(ProbComp<RealFn> fp);

CovFn rbf(double variance, double lengthscale);

// Gaussian process by incremental one-point conditioning. The returned
// function draws f(x) on first query from the normal given by the current
// conditional mean and variance, then conditions on it. Query q reads one
// node, child q of the handle.
ProbComp<RealFn> gp(RealFn mean, CovFn cov);

}  // namespace lazyppl

#endif  // LAZYPPL_PROCESSES_HPP_
