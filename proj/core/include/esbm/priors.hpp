#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "esbm/special.hpp"

namespace esbm {

enum class PriorKind { DirichletMultinomial, DirichletProcess, PitmanYor, Gnedin };

/// A Gibbs-type partition prior. Parameters are validated on construction.
///
/// Every member of the family has EPPF  W(V,H) * prod_h (1 - sigma)_{n_h - 1}
/// where sigma is the discount and W(V,H) a kind-specific weight.
class PriorSpec {
 public:
  /// Finite population of max_clusters groups, discount -beta.
  static PriorSpec dirichlet_multinomial(double beta, int max_clusters);
  static PriorSpec dirichlet_process(double alpha);
  /// sigma in [0,1), alpha > -sigma.
  static PriorSpec pitman_yor(double sigma, double alpha);
  /// gamma in (0,1); discount -1.
  static PriorSpec gnedin(double gamma);

  PriorKind kind() const { return kind_; }
  double discount() const { return sigma_; }
  double beta() const { return beta_; }
  int max_clusters() const { return max_clusters_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  /// log W(n, k); kLogZero when k exceeds the DM population size.
  double log_weight(long n, long k) const;

  /// Unnormalized urn weight of joining an existing cluster of size
  /// `cluster_size`, and of opening a new cluster, when `nodes` nodes are
  /// already placed in `clusters` clusters. Closed forms of the four schemes;
  /// common factors are dropped.
  double log_join_weight(std::size_t cluster_size, std::size_t nodes, std::size_t clusters) const;
  double log_new_weight(std::size_t nodes, std::size_t clusters) const;

  std::string name() const;
  std::string describe() const;

 private:
  PriorSpec() = default;

  PriorKind kind_ = PriorKind::DirichletProcess;
  double sigma_ = 0.0;
  double beta_ = 0.0;
  int max_clusters_ = 0;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
};

/// log p(z) for a partition with the given cluster sizes (V = sum of sizes).
double log_eppf(const PriorSpec& prior, std::span<const std::size_t> sizes);

/// Unnormalized log-weight for node `sizes.sum()+1` joining cluster h,
/// h in 0..H (h == H is a new cluster). Proportional across h to the exact
/// predictive probability.
double log_urn_weight(const PriorSpec& prior, std::size_t h, std::span<const std::size_t> sizes);

struct HDistribution {
  std::vector<double> pmf;  // pmf[h-1] = pr(H = h), h = 1..V
  double mean = 0.0;
};

/// Prior distribution of the number of non-empty clusters among V nodes.
HDistribution h_distribution(const PriorSpec& prior, std::size_t nodes);

/// Closed form of pr(H=h) under the Gnedin process.
HDistribution gnedin_h_distribution(double gamma, std::size_t nodes);

/// Generalized factorial coefficients C(n, k; sigma), k = 0..n, sign-tracked.
std::vector<SignedLog> generalized_factorial_row(std::size_t n, double sigma);

/// log |s(n, k)|, k = 0..n, unsigned Stirling numbers of the first kind.
std::vector<double> log_stirling_first_row(std::size_t n);

/// Gnedin prior on the population number of clusters: gamma (1-gamma)_{h-1} / h!.
double gn_population_pmf(double gamma, long h);

/// Returns `base` with its free hyperparameter (DP alpha, PY alpha with sigma
/// fixed, DM beta with max_clusters fixed, GN gamma) set so that E[H] over
/// `nodes` nodes equals `target_mean`. Bisection on the prior mean.
PriorSpec elicit_prior(const PriorSpec& base, double target_mean, std::size_t nodes);

}  // namespace esbm
