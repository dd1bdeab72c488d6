#include "lazyppl/inference.hpp"

#include <sstream>

namespace lazyppl {

KernelSpec KernelSpec::all_sites(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("all-sites kernel: p must lie in [0,1]");
  }
  KernelSpec k;
  k.kind_ = Kind::kAllSites;
  k.p_ = p;
  return k;
}

KernelSpec KernelSpec::single_site() {
  KernelSpec k;
  k.kind_ = Kind::kSingleSite;
  return k;
}

KernelSpec KernelSpec::mixture(std::vector<double> weights,
                               std::vector<KernelSpec> components) {
  if (weights.empty() || weights.size() != components.size()) {
    throw InvalidParameter("mixture: need one weight per component");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidParameter("mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidParameter("mixture: weights must sum to 1");
  }
  KernelSpec k;
  k.kind_ = Kind::kMixture;
  k.weights_ = std::move(weights);
  k.components_ = std::move(components);
  if (k.depth() > 2) throw InvalidParameter("mixture: nesting deeper than 2");
  return k;
}

int KernelSpec::depth() const {
  int d = 0;
  for (const auto& c : components_) d = std::max(d, c.depth());
  return kind_ == Kind::kMixture ? d + 1 : 0;
}

std::string KernelSpec::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kAllSites:
      out << "all-sites(" << p_ << ")";
      break;
    case Kind::kSingleSite:
      out << "single-site";
      break;
    case Kind::kMixture:
      out << "mixture(";
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i > 0) out << ", ";
        out << weights_[i] << "*" << components_[i].describe();
      }
      out << ")";
      break;
  }
  return out.str();
}

KernelSpec irreducible_mix(double r, double p) {
  if (!(r > 0.0 && r < 1.0)) {
    throw InvalidParameter("irreducible_mix: r must lie in (0,1)");
  }
  return KernelSpec::mixture({r, 1.0 - r},
                             {KernelSpec::all_sites(1.0), KernelSpec::all_sites(p)});
}

double weight_log_ratio(LogWeight current, LogWeight candidate) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (candidate.is_zero()) return -inf;
  if (current.is_zero()) return inf;
  return candidate.value() - current.value();
}

double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio)) return 0.0;
  if (log_ratio >= 0.0) return 1.0;
  return std::exp(log_ratio);
}

std::shared_ptr<const OverrideStore> overrides_from(const AccessLog& log) {
  auto store = std::make_shared<OverrideStore>();
  for (const auto& [path, value] : log.reads()) store->set(path, value);
  return store;
}

std::size_t site_index(std::uint64_t epoch, std::size_t n) {
  std::uint64_t h = derive_seed(epoch, 0, 0x73697465ULL);
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(h) * n) >> 64);
}

void MhConfig::validate() const {
  if (steps == 0) throw InvalidParameter("mh: steps must be >= 1");
  if (burn_in >= steps) throw InvalidParameter("mh: burn_in must be < steps");
  if (thin == 0) throw InvalidParameter("mh: thin must be >= 1");
}

}  // namespace lazyppl
