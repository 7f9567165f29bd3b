#include "esbm/cohesion.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "esbm/error.hpp"

namespace esbm {

CohesionSpec::CohesionSpec(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.empty()) throw ValidationError("cohesion needs at least one category");
  for (std::size_t c = 0; c < alphas_.size(); ++c) {
    if (!(alphas_[c] > 0.0) || !std::isfinite(alphas_[c])) {
      throw ValidationError("cohesion parameter alpha_" + std::to_string(c + 1) + " must be positive");
    }
  }
  alpha0_ = std::accumulate(alphas_.begin(), alphas_.end(), 0.0);
}

CohesionSpec CohesionSpec::uniform(std::size_t categories, double alpha) {
  return CohesionSpec(std::vector<double>(categories, alpha));
}

double log_cohesion(const CohesionSpec& spec, std::span<const std::size_t> counts) {
  if (counts.size() != spec.categories()) {
    throw ValidationError("cohesion expects " + std::to_string(spec.categories()) + " category counts, got " +
                          std::to_string(counts.size()));
  }
  long total = 0;
  double out = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out += log_rising(spec.alpha(c), static_cast<long>(counts[c]));
    total += static_cast<long>(counts[c]);
  }
  return out - log_rising(spec.alpha0(), total);
}

double log_supervised_prior(const PriorSpec& prior, const CohesionSpec& spec, const Partition& part,
                            const AttributeTable& attrs) {
  if (attrs.size() != part.size()) {
    throw ValidationError("attribute table covers " + std::to_string(attrs.size()) + " nodes, partition has " +
                          std::to_string(part.size()));
  }
  if (attrs.categories() > spec.categories()) {
    throw ValidationError("attribute table has more categories than the cohesion");
  }
  const double base = log_eppf(prior, part.sizes());
  if (base == kLogZero) return kLogZero;
  const std::size_t c = spec.categories();
  std::vector<std::size_t> counts(part.clusters() * c, 0);
  for (std::size_t v = 0; v < part.size(); ++v) {
    ++counts[static_cast<std::size_t>(part[v]) * c + static_cast<std::size_t>(attrs[v])];
  }
  double out = base;
  for (std::size_t h = 0; h < part.clusters(); ++h) {
    out += log_cohesion(spec, std::span<const std::size_t>(counts.data() + h * c, c));
  }
  return out;
}

double log_supervised_urn_weight(const PriorSpec& prior, const CohesionSpec& spec, std::size_t h,
                                 std::span<const std::size_t> sizes,
                                 std::span<const std::size_t> cluster_counts, int category) {
  if (category < 0 || static_cast<std::size_t>(category) >= spec.categories()) {
    throw ValidationError("category " + std::to_string(category + 1) + " is outside the cohesion");
  }
  const double base = log_urn_weight(prior, h, sizes);
  const auto x = static_cast<std::size_t>(category);
  if (h == sizes.size()) return base + std::log(spec.alpha(x) / spec.alpha0());
  if (cluster_counts.size() != spec.categories()) {
    throw ValidationError("cluster category counts do not match the cohesion");
  }
  return base + std::log((static_cast<double>(cluster_counts[x]) + spec.alpha(x)) /
                         (static_cast<double>(sizes[h]) + spec.alpha0()));
}

}  // namespace esbm
