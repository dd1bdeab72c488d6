#ifndef LAZYPPL_PROB_HPP_
#define LAZYPPL_PROB_HPP_

// Probability computations: deterministic functions from a tree handle to a
// value. Sequencing splits the handle, so independent pieces of a program
// read disjoint parts of the tree. Streams and memoized functions are lazy:
// they read only the subtrees of the elements or arguments actually demanded.

#include <bit>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lazyppl/errors.hpp"
#include "lazyppl/sample_tree.hpp"

namespace lazyppl {

using RealFn = std::function<double(double)>;

template <class A>
class ProbComp {
 public:
  using value_type = A;
  using Body = std::function<A(const TreeHandle&)>;

  ProbComp() = default;
  explicit ProbComp(Body body)
      : body_(std::make_shared<const Body>(std::move(body))) {}

  A run(const TreeHandle& h) const { return (*body_)(h); }
  A operator()(const TreeHandle& h) const { return run(h); }

 private:
  std::shared_ptr<const Body> body_;
};

template <class T>
struct is_prob_comp : std::false_type {};
template <class A>
struct is_prob_comp<ProbComp<A>> : std::true_type {};

template <class A>
ProbComp<std::decay_t<A>> pure(A&& x) {
  return ProbComp<std::decay_t<A>>(
      [x = std::forward<A>(x)](const TreeHandle&) { return x; });
}

// Runs `m` on the first split component and `f(result)` on the second.
template <class A, class F>
  requires is_prob_comp<std::invoke_result_t<F, A>>::value
auto bind(ProbComp<A> m, F f) {
  using Result = std::invoke_result_t<F, A>;
  return Result([m = std::move(m), f = std::move(f)](const TreeHandle& h) {
    auto [first, second] = h.split();
    return f(m.run(first)).run(second);
  });
}

// Applies `g` to the result without touching the tree.
template <class A, class G>
auto fmap(ProbComp<A> m, G g) {
  using B = std::invoke_result_t<G, A>;
  return ProbComp<B>([m = std::move(m), g = std::move(g)](const TreeHandle& h) {
    return g(m.run(h));
  });
}

// A draw bound to its subtree but not yet performed.
template <class A>
class Lazy {
 public:
  Lazy(ProbComp<A> m, TreeHandle h)
      : state_(std::make_shared<State>(State{std::move(m), std::move(h), {}})) {}

  const A& get() const {
    if (!state_->value) state_->value.emplace(state_->m.run(state_->h));
    return *state_->value;
  }
  bool forced() const { return state_->value.has_value(); }

 private:
  struct State {
    ProbComp<A> m;
    TreeHandle h;
    std::optional<A> value;
  };
  std::shared_ptr<State> state_;
};

// Straight-line sequencing inside a computation body; each draw is the
// left operand of a bind whose continuation is the rest of the body.
class ProbScope {
 public:
  explicit ProbScope(TreeHandle h) : rest_(std::move(h)) {}

  template <class A>
  A draw(const ProbComp<A>& m) {
    return m.run(next());
  }
  template <class A>
  A operator()(const ProbComp<A>& m) {
    return draw(m);
  }

  // Binds `m` to its subtree without reading it.
  template <class A>
  Lazy<A> defer(const ProbComp<A>& m) {
    return Lazy<A>(m, next());
  }

  // Runs `m` as the final statement, on the remaining handle.
  template <class A>
  A tail(const ProbComp<A>& m) const {
    return m.run(rest_);
  }

  const TreeHandle& handle() const { return rest_; }

 private:
  TreeHandle next() {
    auto [first, second] = rest_.split();
    rest_ = std::move(second);
    return first;
  }

  TreeHandle rest_;
};

template <class F>
auto make_prob(F f) {
  using A = std::invoke_result_t<F&, ProbScope&>;
  return ProbComp<A>([f = std::move(f)](const TreeHandle& h) {
    ProbScope scope(h);
    return f(scope);
  });
}

// Infinite lazy sequence with a per-run cache. Random-access streams compute
// element n independently; sequential streams compute elements in order and
// may carry state from one element to the next.
template <class A>
class Stream {
 public:
  using Generator = std::function<A(std::size_t)>;
  enum class Access { kRandom, kSequential };

  Stream() = default;
  explicit Stream(Generator gen, Access access = Access::kRandom)
      : state_(std::make_shared<State>()) {
    state_->gen = std::move(gen);
    state_->access = access;
  }

  const A& at(std::size_t n) const {
    State& s = *state_;
    if (auto it = s.cache.find(n); it != s.cache.end()) return it->second;
    if (s.access == Access::kSequential) {
      while (s.prefix <= n) {
        A value = s.gen(s.prefix);
        s.cache.emplace(s.prefix, std::move(value));
        ++s.prefix;
      }
      return s.cache.at(n);
    }
    A value = s.gen(n);
    return s.cache.emplace(n, std::move(value)).first->second;
  }
  const A& operator[](std::size_t n) const { return at(n); }

  std::vector<A> take(std::size_t n) const {
    std::vector<A> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
    return out;
  }

  // Number of elements computed so far.
  std::size_t forced() const { return state_->cache.size(); }

 private:
  struct State {
    Generator gen;
    Access access = Access::kRandom;
    std::unordered_map<std::size_t, A> cache;
    std::size_t prefix = 0;
  };
  std::shared_ptr<State> state_;
};

// Element n runs `p` on child n.
template <class A>
ProbComp<Stream<A>> iid(ProbComp<A> p) {
  return ProbComp<Stream<A>>([p = std::move(p)](const TreeHandle& h) {
    return Stream<A>([p, h](std::size_t n) { return p.run(h.child(n)); });
  });
}

// Element n is the output of the n-th iterate of `f`, run on child n.
template <class B, class F>
auto unfold(F f, B y0) {
  using Step = std::invoke_result_t<F&, const B&>;
  using Pair = typename Step::value_type;
  using A = typename Pair::first_type;
  return ProbComp<Stream<A>>([f = std::move(f), y0](const TreeHandle& h) {
    auto gen = [f, h, y = y0](std::size_t n) mutable {
      auto [x, next] = f(y).run(h.child(n));
      y = std::move(next);
      return x;
    };
    return Stream<A>(std::move(gen), Stream<A>::Access::kSequential);
  });
}

// g(n) runs f(n) on child n, once per run.
template <class F>
auto memoize_nat(F f) {
  using B = typename std::invoke_result_t<F&, std::int64_t>::value_type;
  using Fn = std::function<B(std::int64_t)>;
  return ProbComp<Fn>([f = std::move(f)](const TreeHandle& h) -> Fn {
    auto cache = std::make_shared<std::unordered_map<std::int64_t, B>>();
    return [f, h, cache](std::int64_t n) -> B {
      if (n < 0) {
        throw std::invalid_argument("memoized function over naturals called "
                                    "with negative argument " +
                                    std::to_string(n));
      }
      if (auto it = cache->find(n); it != cache->end()) return it->second;
      B value = f(n).run(h.child(static_cast<std::uint64_t>(n)));
      cache->emplace(n, value);
      return value;
    };
  });
}

// Canonical byte encodings for memoization keys.
template <std::integral K>
void encode_key(std::string& out, K k) {
  auto v = static_cast<std::uint64_t>(static_cast<std::int64_t>(k));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void encode_key(std::string& out, double k) {
  if (k == 0.0) k = 0.0;  // -0 and +0 compare equal
  encode_key(out, std::bit_cast<std::int64_t>(k));
}
inline void encode_key(std::string& out, const std::string& k) {
  encode_key(out, static_cast<std::int64_t>(k.size()));
  out += k;
}
template <class K1, class K2>
void encode_key(std::string& out, const std::pair<K1, K2>& k) {
  encode_key(out, k.first);
  encode_key(out, k.second);
}

template <class K>
std::uint64_t key_index(const K& k) {
  std::string bytes;
  encode_key(bytes, k);
  return bytes_hash(0x6d656d6fULL, bytes);
}

// g(k) runs f(k) on the child indexed by the hash of k's encoding; the
// per-run memo is keyed by k itself.
template <class K, class F>
auto memoize_keyed(F f) {
  using B = typename std::invoke_result_t<F&, const K&>::value_type;
  using Fn = std::function<B(const K&)>;
  return ProbComp<Fn>([f = std::move(f)](const TreeHandle& h) -> Fn {
    auto cache = std::make_shared<std::map<K, B>>();
    return [f, h, cache](const K& k) -> B {
      if (auto it = cache->find(k); it != cache->end()) return it->second;
      B value = f(k).run(h.child(key_index(k)));
      cache->emplace(k, value);
      return value;
    };
  });
}

// Scalar primitives. Each consumes exactly one node (the handle's root)
// through the inverse CDF of its distribution. Parameters are checked when
// the computation is built.
ProbComp<double> uniform();
ProbComp<double> normal(double mu, double sigma);
ProbComp<double> exponential(double rate);
ProbComp<double> beta(double a, double b);
ProbComp<bool> bernoulli(double p);
ProbComp<int> categorical(std::vector<double> weights);

}  // namespace lazyppl

#endif  // LAZYPPL_PROB_HPP_
