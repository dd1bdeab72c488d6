#ifndef LAZYPPL_MEAS_HPP_
#define LAZYPPL_MEAS_HPP_

// Unnormalized measures: probability computations that additionally
// accumulate a log-weight through `score`.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "lazyppl/prob.hpp"
#include "lazyppl/sample_tree.hpp"

namespace lazyppl {

using Unit = std::monostate;

// Log of a non-negative weight; -inf is weight zero and absorbs.
class LogWeight {
 public:
  constexpr LogWeight() = default;
  static LogWeight from_log(double value);
  static LogWeight from_weight(double weight);
  static constexpr LogWeight zero() {
    LogWeight w;
    w.value_ = -std::numeric_limits<double>::infinity();
    return w;
  }

  double value() const { return value_; }
  bool is_zero() const { return value_ == -std::numeric_limits<double>::infinity(); }

  LogWeight& operator+=(LogWeight other) {
    value_ += other.value_;
    return *this;
  }
  friend LogWeight operator+(LogWeight a, LogWeight b) { return a += b; }
  friend bool operator==(LogWeight, LogWeight) = default;

 private:
  double value_ = 0.0;
};

template <class A>
class MeasComp {
 public:
  using value_type = A;
  using Body = std::function<A(const TreeHandle&, LogWeight&)>;

  MeasComp() = default;
  explicit MeasComp(Body body)
      : body_(std::make_shared<const Body>(std::move(body))) {}

  A run(const TreeHandle& h, LogWeight& weight) const {
    return (*body_)(h, weight);
  }

 private:
  std::shared_ptr<const Body> body_;
};

template <class T>
struct is_meas_comp : std::false_type {};
template <class A>
struct is_meas_comp<MeasComp<A>> : std::true_type {};

template <class A>
MeasComp<A> sample(ProbComp<A> p) {
  return MeasComp<A>([p = std::move(p)](const TreeHandle& h, LogWeight&) {
    return p.run(h);
  });
}

// Multiplies the weight by r (r >= 0). Reads no tree nodes.
MeasComp<Unit> score(double r);
// Multiplies the weight by exp(log_r).
MeasComp<Unit> score_log(double log_r);

template <class A, class F>
  requires is_meas_comp<std::invoke_result_t<F, A>>::value
auto bind(MeasComp<A> m, F f) {
  using Result = std::invoke_result_t<F, A>;
  return Result([m = std::move(m), f = std::move(f)](const TreeHandle& h,
                                                      LogWeight& w) {
    auto [first, second] = h.split();
    return f(m.run(first, w)).run(second, w);
  });
}

template <class A>
MeasComp<A> pure_meas(A x) {
  return MeasComp<A>([x = std::move(x)](const TreeHandle&, LogWeight&) {
    return x;
  });
}

// Straight-line sequencing for weighted bodies.
class MeasScope {
 public:
  MeasScope(TreeHandle h, LogWeight& weight)
      : rest_(std::move(h)), weight_(&weight) {}

  template <class A>
  A sample(const ProbComp<A>& p) {
    return p.run(next());
  }
  template <class A>
  A operator()(const MeasComp<A>& m) {
    return m.run(next(), *weight_);
  }
  void score(double r);
  void score_log(double log_r);

 private:
  TreeHandle next() {
    auto [first, second] = rest_.split();
    rest_ = std::move(second);
    return first;
  }

  TreeHandle rest_;
  LogWeight* weight_;
};

template <class F>
auto make_meas(F f) {
  using A = std::invoke_result_t<F&, MeasScope&>;
  return MeasComp<A>([f = std::move(f)](const TreeHandle& h, LogWeight& w) {
    MeasScope scope(h, w);
    return f(scope);
  });
}

// One complete evaluation of a weighted program on one tree.
template <class A>
struct RunRecord {
  A result;
  LogWeight log_weight;
  AccessLog access;
  RunDiagnostics diagnostics;
  // Keeps the run's tree alive so lazy results can be forced later.
  std::shared_ptr<RunContext> context;
};

// A model failure, carrying the reads made before it.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, AccessLog partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const AccessLog& partial_log() const { return partial_; }

 private:
  AccessLog partial_;
};

template <class A>
RunRecord<A> run_weighted(const MeasComp<A>& m, std::uint64_t seed,
                          std::shared_ptr<const OverrideStore> overrides = {},
                          ProposalContext proposal = {}) {
  TreeHandle h = TreeHandle::root(seed, std::move(overrides),
                                  std::move(proposal));
  LogWeight w;
  try {
    A result = m.run(h, w);
    const RunContext& ctx = *h.context();
    return RunRecord<A>{std::move(result), w, ctx.log(), ctx.diagnostics(),
                        h.context()};
  } catch (const std::exception& e) {
    throw RunError(e.what(), h.context()->log());
  }
}

// exp(-(x - mu)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)).
double normal_pdf(double mu, double sigma, double x);
double normal_log_pdf(double mu, double sigma, double x);

}  // namespace lazyppl

#endif  // LAZYPPL_MEAS_HPP_
