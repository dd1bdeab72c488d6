#ifndef LAZYPPL_INFERENCE_HPP_
#define LAZYPPL_INFERENCE_HPP_

// Samplers over weighted programs: likelihood-weighted importance sampling
// and Metropolis-Hastings-Green chains whose proposals mutate the tree.
//
// A chain state is the set of nodes its current run read, with their values.
// Nodes the state never read are not stored; every proposal treats them as
// fresh uniforms, which has the same law on observables as carrying them
// along and mutating them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lazyppl/errors.hpp"
#include "lazyppl/meas.hpp"
#include "lazyppl/sample_tree.hpp"

namespace lazyppl {

// Deterministic source for epochs, component choices and accept draws.
class ChainRng {
 public:
  explicit ChainRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t epoch() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

class KernelSpec {
 public:
  enum class Kind { kAllSites, kSingleSite, kMixture };

  // Resample every node independently with probability p.
  static KernelSpec all_sites(double p);
  // Resample one node chosen uniformly from those the current run read.
  static KernelSpec single_site();
  // Pick a component with the given constant probabilities. Weights must be
  // positive and sum to 1; nesting depth is at most 2.
  static KernelSpec mixture(std::vector<double> weights,
                            std::vector<KernelSpec> components);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<KernelSpec>& components() const { return components_; }
  int depth() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::kSingleSite;
  double p_ = 0.0;
  std::vector<double> weights_;
  std::vector<KernelSpec> components_;
};

// r * all_sites(1) + (1 - r) * all_sites(p).
KernelSpec irreducible_mix(double r, double p);

// log(l(candidate) / l(current)) with the conventions 0/0 -> reject and
// x/0 -> accept.
double weight_log_ratio(LogWeight current, LogWeight candidate);

// min(1, exp(log_ratio)); NaN maps to 0.
double acceptance_probability(double log_ratio);

// Override store holding exactly the reads of a run.
std::shared_ptr<const OverrideStore> overrides_from(const AccessLog& log);

// Index in [0, n) derived from an epoch.
std::size_t site_index(std::uint64_t epoch, std::size_t n);

template <class A>
struct ChainState {
  std::shared_ptr<const OverrideStore> overrides;
  RunRecord<A> record;
  std::uint64_t step_index = 0;
  std::uint64_t seed = 0;
};

template <class A>
struct Proposal {
  RunRecord<A> candidate;
  double log_ratio;
};

template <class A>
ChainState<A> chain_state_from(RunRecord<A> record, std::uint64_t seed) {
  auto overrides = overrides_from(record.access);
  return ChainState<A>{std::move(overrides), std::move(record), 0, seed};
}

template <class A>
Proposal<A> propose_all_sites(const MeasComp<A>& m, const ChainState<A>& state,
                              double p, std::uint64_t epoch) {
  RunRecord<A> candidate = run_weighted(m, state.seed, state.overrides,
                                        ProposalContext::all_sites(p, epoch));
  double r = weight_log_ratio(state.record.log_weight, candidate.log_weight);
  return Proposal<A>{std::move(candidate), r};
}

// Green ratio l(w') |S_w| / (l(w) |S_w'|). A target the candidate did not
// read has zero reverse selection probability, so that proposal is refused.
template <class A>
Proposal<A> propose_single_site(const MeasComp<A>& m,
                                const ChainState<A>& state,
                                std::uint64_t epoch) {
  const auto& reads = state.record.access.reads();
  if (reads.empty()) {
    throw NoSites("single-site proposal: the model consumed no randomness");
  }
  const NodePath& target = reads[site_index(epoch, reads.size())].first;
  RunRecord<A> candidate = run_weighted(
      m, state.seed, state.overrides, ProposalContext::single_site(target, epoch));
  double r = weight_log_ratio(state.record.log_weight, candidate.log_weight);
  if (!candidate.access.contains(target)) {
    r = -std::numeric_limits<double>::infinity();
  } else {
    r += std::log(static_cast<double>(reads.size())) -
         std::log(static_cast<double>(candidate.access.size()));
  }
  return Proposal<A>{std::move(candidate), r};
}

struct StepOutcome {
  bool accepted = false;
  bool error = false;
  // Top-level mixture component used, 0 for plain kernels.
  std::size_t component = 0;
  double acceptance = 0.0;
};

template <class A>
StepOutcome mhg_step(const MeasComp<A>& m, ChainState<A>& state,
                     const KernelSpec& kernel, ChainRng& rng) {
  StepOutcome out;
  const KernelSpec* leaf = &kernel;
  bool top = true;
  while (leaf->kind() == KernelSpec::Kind::kMixture) {
    double u = rng.uniform();
    const auto& ws = leaf->weights();
    std::size_t i = 0;
    double acc = ws[0];
    while (i + 1 < ws.size() && !(u < acc)) acc += ws[++i];
    if (top) out.component = i;
    top = false;
    leaf = &leaf->components()[i];
  }

  const std::uint64_t epoch = rng.epoch();
  std::optional<Proposal<A>> proposal;
  try {
    if (leaf->kind() == KernelSpec::Kind::kAllSites) {
      proposal.emplace(propose_all_sites(m, state, leaf->p(), epoch));
    } else {
      proposal.emplace(propose_single_site(m, state, epoch));
    }
  } catch (const RunError&) {
    out.error = true;
  } catch (const NoSites&) {
    out.error = true;
  }
  ++state.step_index;
  if (!proposal) return out;

  out.acceptance = acceptance_probability(proposal->log_ratio);
  if (rng.uniform() < out.acceptance) {
    out.accepted = true;
    state.overrides = overrides_from(proposal->candidate.access);
    state.record = std::move(proposal->candidate);
  }
  return out;
}

struct MhConfig {
  std::size_t steps = 10000;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  std::size_t init_retries = 1000;

  // Throws InvalidParameter on steps == 0, burn_in >= steps or thin == 0.
  void validate() const;
  std::size_t emitted() const { return (steps - burn_in) / thin; }
};

template <class A>
struct Sample {
  A value;
  double log_weight;
  bool accepted;
  std::size_t sites;
};

struct MhStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t errors = 0;
  std::size_t init_attempts = 0;
  std::size_t psd_warnings = 0;
  std::vector<std::size_t> component_counts;
  std::size_t min_sites = 0;
  std::size_t max_sites = 0;
  double mean_sites = 0.0;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0
                          : static_cast<double>(accepted) /
                                static_cast<double>(proposals);
  }
};

// First state of a chain: the run on the base tree, or if that has zero
// weight (or fails), runs on fully fresh trees until one has positive weight.
template <class A>
ChainState<A> initial_state(const MeasComp<A>& m, const MhConfig& config,
                            ChainRng& rng, MhStats& stats) {
  for (std::size_t attempt = 0; attempt <= config.init_retries; ++attempt) {
    ++stats.init_attempts;
    ProposalContext ctx = attempt == 0
                              ? ProposalContext::none()
                              : ProposalContext::all_sites(1.0, rng.epoch());
    try {
      RunRecord<A> record = run_weighted(m, config.seed, {}, ctx);
      if (!record.log_weight.is_zero()) {
        return chain_state_from(std::move(record), config.seed);
      }
    } catch (const RunError&) {
      ++stats.errors;
    }
  }
  throw DegenerateMeasure("mh: no positive-weight initial state after " +
                          std::to_string(config.init_retries + 1) + " attempts");
}

// Runs the chain and hands each emitted sample (after burn-in, every
// `thin`-th step) to `emit`.
template <class A, class Emit>
MhStats mh(const MeasComp<A>& m, const KernelSpec& kernel,
           const MhConfig& config, Emit&& emit) {
  config.validate();
  MhStats stats;
  stats.component_counts.assign(
      kernel.kind() == KernelSpec::Kind::kMixture ? kernel.weights().size() : 1,
      0);
  ChainRng rng(derive_seed(config.seed, 0, 0x63686169ULL));
  ChainState<A> state = initial_state(m, config, rng, stats);

  std::size_t emitted = 0;
  double site_sum = 0.0;
  stats.min_sites = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 1; t <= config.steps; ++t) {
    StepOutcome step = mhg_step(m, state, kernel, rng);
    ++stats.proposals;
    ++stats.component_counts[step.component];
    if (step.accepted) ++stats.accepted;
    if (step.error) ++stats.errors;
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      const auto& rec = state.record;
      std::size_t sites = rec.access.size();
      stats.min_sites = std::min(stats.min_sites, sites);
      stats.max_sites = std::max(stats.max_sites, sites);
      site_sum += static_cast<double>(sites);
      stats.psd_warnings += rec.diagnostics.psd_warnings;
      emit(Sample<A>{rec.result, rec.log_weight.value(), step.accepted, sites});
      ++emitted;
    }
  }
  if (emitted == 0) stats.min_sites = 0;
  stats.mean_sites = emitted == 0 ? 0.0 : site_sum / static_cast<double>(emitted);
  return stats;
}

template <class A>
struct MhResult {
  std::vector<Sample<A>> samples;
  MhStats stats;
};

template <class A>
MhResult<A> mh_collect(const MeasComp<A>& m, const KernelSpec& kernel,
                       const MhConfig& config) {
  MhResult<A> out;
  out.samples.reserve(config.steps > config.burn_in ? config.emitted() : 0);
  out.stats = mh(m, kernel, config,
                 [&out](Sample<A> s) { out.samples.push_back(std::move(s)); });
  return out;
}

// Independent chains with seeds derived from config.seed, run in parallel.
template <class A>
std::vector<MhResult<A>> run_chains(const MeasComp<A>& m,
                                    const KernelSpec& kernel,
                                    const MhConfig& config, std::size_t chains) {
  std::vector<MhResult<A>> out(chains);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chains); ++c) {
    try {
      MhConfig local = config;
      local.seed = chains == 1 ? config.seed
                               : derive_seed(config.seed, static_cast<std::uint64_t>(c),
                                             0x636861696eULL);
      out[static_cast<std::size_t>(c)] = mh_collect(m, kernel, local);
    } catch (...) {
#pragma omp critical(lazyppl_chain_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class A>
struct Weighted {
  A value;
  LogWeight log_weight;
};

inline std::uint64_t weighted_run_seed(std::uint64_t seed, std::size_t i) {
  return derive_seed(seed, i, 0x6c776973ULL);
}

// Reference implementation: n independent runs in index order.
template <class A>
std::vector<Weighted<A>> weighted_runs_serial(const MeasComp<A>& m,
                                              std::size_t n,
                                              std::uint64_t seed) {
  std::vector<Weighted<A>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RunRecord<A> r = run_weighted(m, weighted_run_seed(seed, i));
    out.push_back(Weighted<A>{std::move(r.result), r.log_weight});
  }
  return out;
}

// Same runs as weighted_runs_serial, spread over OpenMP threads. Output is
// identical element for element.
template <class A>
std::vector<Weighted<A>> weighted_runs_parallel(const MeasComp<A>& m,
                                                std::size_t n,
                                                std::uint64_t seed) {
  std::vector<std::optional<Weighted<A>>> slots(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      RunRecord<A> r =
          run_weighted(m, weighted_run_seed(seed, static_cast<std::size_t>(i)));
      slots[static_cast<std::size_t>(i)].emplace(
          Weighted<A>{std::move(r.result), r.log_weight});
    } catch (...) {
#pragma omp critical(lazyppl_weighted_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Weighted<A>> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Infinite stream resampling weighted runs in proportion to their weights.
template <class A>
class LwisStream {
 public:
  LwisStream(std::vector<Weighted<A>> runs, std::uint64_t seed)
      : runs_(std::move(runs)), rng_(derive_seed(seed, 0, 0x7265736dULL)) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& r : runs_) top = std::max(top, r.log_weight.value());
    if (runs_.empty() || top == -std::numeric_limits<double>::infinity()) {
      throw DegenerateMeasure("lwis: every run has weight zero");
    }
    cumulative_.reserve(runs_.size());
    double total = 0.0;
    for (const auto& r : runs_) {
      total += std::exp(r.log_weight.value() - top);
      cumulative_.push_back(total);
    }
  }

  const A& next() {
    double u = rng_.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= runs_.size()) i = runs_.size() - 1;
    return runs_[i].value;
  }

  const std::vector<Weighted<A>>& runs() const { return runs_; }

  // Self-normalized weight of run i.
  double normalized_weight(std::size_t i) const {
    double prev = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - prev) / cumulative_.back();
  }

 private:
  std::vector<Weighted<A>> runs_;
  std::vector<double> cumulative_;
  ChainRng rng_;
};

template <class A>
LwisStream<A> lwis(std::size_t n, const MeasComp<A>& m, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("lwis: need at least one run");
  return LwisStream<A>(weighted_runs_parallel(m, n, seed), seed);
}

}  // namespace lazyppl

#endif  // LAZYPPL_INFERENCE_HPP_
