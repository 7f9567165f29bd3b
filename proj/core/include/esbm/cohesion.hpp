#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "esbm/network.hpp"
#include "esbm/priors.hpp"

namespace esbm {

/// Dirichlet parameters of the Dirichlet-multinomial cohesion.
class CohesionSpec {
 public:
  explicit CohesionSpec(std::vector<double> alphas);
  static CohesionSpec uniform(std::size_t categories, double alpha = 1.0);

  std::size_t categories() const { return alphas_.size(); }
  double alpha(std::size_t c) const { return alphas_[c]; }
  double alpha0() const { return alpha0_; }
  std::span<const double> alphas() const { return alphas_; }

 private:
  std::vector<double> alphas_;
  double alpha0_ = 0.0;
};

/// Dirichlet-multinomial marginal likelihood of one cluster's attributes,
/// normalized so that the empty cluster scores 0.
double log_cohesion(const CohesionSpec& spec, std::span<const std::size_t> counts);

/// log p(z | X) up to a z-independent constant: log EPPF plus the cohesions.
double log_supervised_prior(const PriorSpec& prior, const CohesionSpec& spec,
                            const Partition& part, const AttributeTable& attrs);

/// Supervised urn: the unsupervised weight times the homophily factor
/// (n_hx + alpha_x) / (n_h + alpha_0) for an existing cluster, alpha_x / alpha_0
/// for a new one. `cluster_counts` holds n_h1..n_hC of cluster h and is
/// ignored when h == H.
double log_supervised_urn_weight(const PriorSpec& prior, const CohesionSpec& spec, std::size_t h,
                                 std::span<const std::size_t> sizes,
                                 std::span<const std::size_t> cluster_counts, int category);

}  // namespace esbm
