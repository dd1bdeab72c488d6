#ifndef LAZYPPL_SAMPLE_TREE_HPP_
#define LAZYPPL_SAMPLE_TREE_HPP_

// The infinite rose tree of uniforms, realized lazily: the label at a node
// is a pure function of (seed, path), optionally shadowed by an override
// store (accepted MCMC mutations) or a proposal context (pending ones).
// Every node a run inspects is recorded once in that run's access log.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lazyppl {

class NodePath {
 public:
  NodePath() = default;
  NodePath(std::initializer_list<std::uint64_t> indices) : indices_(indices) {}
  explicit NodePath(std::vector<std::uint64_t> indices)
      : indices_(std::move(indices)) {}

  NodePath child(std::uint64_t index) const;

  std::span<const std::uint64_t> indices() const { return indices_; }
  std::size_t depth() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool is_prefix_of(const NodePath& other) const;

  // Slash-separated decimal indices, "/" for the root.
  std::string to_string() const;
  static NodePath parse(std::string_view text);

  friend bool operator==(const NodePath&, const NodePath&) = default;
  friend std::strong_ordering operator<=>(const NodePath& a,
                                          const NodePath& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::vector<std::uint64_t> indices_;
};

// 64-bit keyed hash of the length-prefixed varint encoding of a path.
std::uint64_t path_hash(std::uint64_t seed, const NodePath& path);

// Keyed hash of an arbitrary byte string (used for memoization keys).
std::uint64_t bytes_hash(std::uint64_t seed, std::string_view bytes);

struct NodePathHash {
  std::size_t operator()(const NodePath& p) const noexcept {
    return static_cast<std::size_t>(path_hash(0, p));
  }
};

// Pseudorandom label of `path` under `seed`: top 53 bits of path_hash,
// scaled into [0, 1).
double base_value(std::uint64_t seed, const NodePath& path);

// Mixes a parent seed with a stream index and a domain tag into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t tag = 0);

class OverrideStore {
 public:
  // Throws InvalidParameter unless 0 <= value < 1.
  void set(const NodePath& path, double value);
  std::optional<double> find(const NodePath& path) const;
  bool contains(const NodePath& path) const { return entries_.count(path) > 0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Entries in lexicographic path order.
  std::vector<std::pair<NodePath, double>> sorted() const;

 private:
  std::unordered_map<NodePath, double, NodePathHash> entries_;
};

class AccessLog {
 public:
  // Returns the value previously recorded for `path` in this run, if any.
  std::optional<double> lookup(const NodePath& path) const;
  // Records the first read of `path`; later records of the same path are
  // ignored.
  void record(const NodePath& path, double value);

  const std::vector<std::pair<NodePath, double>>& reads() const {
    return reads_;
  }
  bool contains(const NodePath& path) const { return index_.count(path) > 0; }
  std::size_t size() const { return reads_.size(); }

 private:
  std::vector<std::pair<NodePath, double>> reads_;
  std::unordered_map<NodePath, double, NodePathHash> index_;
};

// How reads resolve while a proposal is being evaluated.
//   AllSites:   each node is resampled with probability p (coin and fresh
//               value are keyed by (epoch, path)); otherwise it keeps its
//               current value.
//   SingleSite: only `target` is resampled.
// A node with no current value (not in the override store) has never been
// inspected by the current state and is drawn fresh for this epoch.
struct ProposalContext {
  enum class Kind { kNone, kAllSites, kSingleSite };

  Kind kind = Kind::kNone;
  double p = 0.0;
  std::uint64_t epoch = 0;
  NodePath target;

  static ProposalContext none() { return {}; }
  static ProposalContext all_sites(double p, std::uint64_t epoch);
  static ProposalContext single_site(NodePath target, std::uint64_t epoch);
};

struct RunDiagnostics {
  // Conditional variances below -1e-6 clamped to zero by gp.
  std::size_t psd_warnings = 0;
};

// Shared state of one run. Owned jointly by every handle of the run and by
// any lazy value (stream, random function) the run returns, so results can
// be forced after the run finishes.
class RunContext {
 public:
  RunContext(std::uint64_t seed, std::shared_ptr<const OverrideStore> overrides,
             ProposalContext proposal);

  // Resolved value at `path`, logged on first read.
  double read(const NodePath& path);
  // Value `path` would resolve to, without logging or caching.
  double resolve(const NodePath& path) const;

  std::uint64_t seed() const { return seed_; }
  const OverrideStore& overrides() const { return *overrides_; }
  const std::shared_ptr<const OverrideStore>& overrides_ptr() const {
    return overrides_;
  }
  const ProposalContext& proposal() const { return proposal_; }
  const AccessLog& log() const { return log_; }
  RunDiagnostics& diagnostics() { return diagnostics_; }
  const RunDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  double fresh_value(const NodePath& path) const;
  double current_value(const NodePath& path) const;

  std::uint64_t seed_;
  std::shared_ptr<const OverrideStore> overrides_;
  ProposalContext proposal_;
  std::uint64_t fresh_seed_;
  std::uint64_t coin_seed_;
  AccessLog log_;
  RunDiagnostics diagnostics_;
};

class TreeHandle {
 public:
  TreeHandle(std::shared_ptr<RunContext> context, NodePath path,
             std::uint64_t offset = 0)
      : context_(std::move(context)), path_(std::move(path)), offset_(offset) {}

  // A handle on a fresh run context at the root path.
  static TreeHandle root(std::uint64_t seed,
                         std::shared_ptr<const OverrideStore> overrides = {},
                         ProposalContext proposal = {});

  // The label at this handle's node.
  double read_root() const { return context_->read(path_); }

  // (path.offset, 0) and (path, offset + 1).
  std::pair<TreeHandle, TreeHandle> split() const;

  // path.(offset + i), 0. Equal to i splits followed by the first component.
  TreeHandle child(std::uint64_t i) const;

  const NodePath& path() const { return path_; }
  std::uint64_t offset() const { return offset_; }
  const std::shared_ptr<RunContext>& context() const { return context_; }

 private:
  std::shared_ptr<RunContext> context_;
  NodePath path_;
  std::uint64_t offset_;
};

}  // namespace lazyppl

#endif  // LAZYPPL_SAMPLE_TREE_HPP_
