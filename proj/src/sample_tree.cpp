#include "lazyppl/sample_tree.hpp"

#include <algorithm>
#include <charconv>

#include "lazyppl/errors.hpp"

namespace lazyppl {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Absorbs a byte stream eight bytes at a time.
class Absorber {
 public:
  explicit Absorber(std::uint64_t seed) : state_(mix64(seed + kGolden)) {}

  void byte(std::uint8_t b) {
    word_ |= static_cast<std::uint64_t>(b) << (8 * fill_);
    ++total_;
    if (++fill_ == 8) flush();
  }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      byte(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    byte(static_cast<std::uint8_t>(v));
  }

  std::uint64_t finish() {
    if (fill_ > 0) flush();
    return mix64(state_ ^ mix64(total_ + kGolden));
  }

 private:
  void flush() {
    state_ = mix64(state_ ^ mix64(word_ + kGolden)) + kGolden;
    word_ = 0;
    fill_ = 0;
  }

  std::uint64_t state_;
  std::uint64_t word_ = 0;
  int fill_ = 0;
  std::uint64_t total_ = 0;
};

constexpr std::uint64_t kFreshTag = 0x46524553ULL;  // "FRES"
constexpr std::uint64_t kCoinTag = 0x434f494eULL;   // "COIN"

}  // namespace

NodePath NodePath::child(std::uint64_t index) const {
  std::vector<std::uint64_t> next;
  next.reserve(indices_.size() + 1);
  next.assign(indices_.begin(), indices_.end());
  next.push_back(index);
  return NodePath(std::move(next));
}

bool NodePath::is_prefix_of(const NodePath& other) const {
  return indices_.size() <= other.indices_.size() &&
         std::equal(indices_.begin(), indices_.end(), other.indices_.begin());
}

std::string NodePath::to_string() const {
  if (indices_.empty()) return "/";
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out.push_back('/');
    out += std::to_string(indices_[i]);
  }
  return out;
}

NodePath NodePath::parse(std::string_view text) {
  if (text == "/") return NodePath{};
  std::vector<std::uint64_t> indices;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('/', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(pos, end - pos);
    std::uint64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} ||
        ptr != token.data() + token.size()) {
      throw ParseError("malformed node path: '" + std::string(text) + "'");
    }
    indices.push_back(value);
    pos = end + 1;
  }
  return NodePath(std::move(indices));
}

std::uint64_t path_hash(std::uint64_t seed, const NodePath& path) {
  Absorber a(seed);
  a.varint(path.depth());
  for (std::uint64_t i : path.indices()) a.varint(i);
  return a.finish();
}

std::uint64_t bytes_hash(std::uint64_t seed, std::string_view bytes) {
  Absorber a(seed);
  a.varint(bytes.size());
  for (char c : bytes) a.byte(static_cast<std::uint8_t>(c));
  return a.finish();
}

double base_value(std::uint64_t seed, const NodePath& path) {
  return static_cast<double>(path_hash(seed, path) >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t tag) {
  return mix64(mix64(seed ^ mix64(tag + kGolden)) + mix64(index + 2 * kGolden));
}

void OverrideStore::set(const NodePath& path, double value) {
  if (!(value >= 0.0 && value < 1.0)) {
    throw InvalidParameter("override value must lie in [0,1), got " +
                           std::to_string(value));
  }
  entries_.insert_or_assign(path, value);
}

std::optional<double> OverrideStore::find(const NodePath& path) const {
  auto it = entries_.find(path);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodePath, double>> OverrideStore::sorted() const {
  std::vector<std::pair<NodePath, double>> out(entries_.begin(),
                                               entries_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::optional<double> AccessLog::lookup(const NodePath& path) const {
  auto it = index_.find(path);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void AccessLog::record(const NodePath& path, double value) {
  if (index_.emplace(path, value).second) reads_.emplace_back(path, value);
}

ProposalContext ProposalContext::all_sites(double p, std::uint64_t epoch) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("all-sites resample probability must lie in [0,1]");
  }
  ProposalContext c;
  c.kind = Kind::kAllSites;
  c.p = p;
  c.epoch = epoch;
  return c;
}

ProposalContext ProposalContext::single_site(NodePath target,
                                             std::uint64_t epoch) {
  ProposalContext c;
  c.kind = Kind::kSingleSite;
  c.epoch = epoch;
  c.target = std::move(target);
  return c;
}

RunContext::RunContext(std::uint64_t seed,
                       std::shared_ptr<const OverrideStore> overrides,
                       ProposalContext proposal)
    : seed_(seed),
      overrides_(overrides ? std::move(overrides)
                           : std::make_shared<const OverrideStore>()),
      proposal_(std::move(proposal)),
      fresh_seed_(derive_seed(seed, proposal_.epoch, kFreshTag)),
      coin_seed_(derive_seed(seed, proposal_.epoch, kCoinTag)) {}

double RunContext::fresh_value(const NodePath& path) const {
  return base_value(fresh_seed_, path);
}

double RunContext::current_value(const NodePath& path) const {
  if (auto v = overrides_->find(path)) return *v;
  return fresh_value(path);
}

double RunContext::resolve(const NodePath& path) const {
  switch (proposal_.kind) {
    case ProposalContext::Kind::kAllSites:
      if (base_value(coin_seed_, path) < proposal_.p) return fresh_value(path);
      return current_value(path);
    case ProposalContext::Kind::kSingleSite:
      if (path == proposal_.target) return fresh_value(path);
      return current_value(path);
    case ProposalContext::Kind::kNone:
      break;
  }
  if (auto v = overrides_->find(path)) return *v;
  return base_value(seed_, path);
}

double RunContext::read(const NodePath& path) {
  if (auto cached = log_.lookup(path)) return *cached;
  double v = resolve(path);
  log_.record(path, v);
  return v;
}

TreeHandle TreeHandle::root(std::uint64_t seed,
                            std::shared_ptr<const OverrideStore> overrides,
                            ProposalContext proposal) {
  return TreeHandle(std::make_shared<RunContext>(seed, std::move(overrides),
                                                 std::move(proposal)),
                    NodePath{}, 0);
}

std::pair<TreeHandle, TreeHandle> TreeHandle::split() const {
  return {TreeHandle(context_, path_.child(offset_), 0),
          TreeHandle(context_, path_, offset_ + 1)};
}

TreeHandle TreeHandle::child(std::uint64_t i) const {
  return TreeHandle(context_, path_.child(offset_ + i), 0);
}

}  // namespace lazyppl
