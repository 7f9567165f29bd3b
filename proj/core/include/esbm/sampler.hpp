#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "esbm/cohesion.hpp"
#include "esbm/network.hpp"
#include "esbm/priors.hpp"
#include "esbm/random.hpp"
#include "esbm/special.hpp"
#include "esbm/trace.hpp"

namespace esbm {

/// Beta(a, b) prior on every block probability.
struct LikelihoodSpec {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
};

/// Attribute supervision of the partition prior.
struct Supervision {
  const AttributeTable* attributes = nullptr;
  CohesionSpec cohesion;
};

enum class InitMode { Singletons, AllInOne, Given };

struct SamplerConfig {
  std::size_t sweeps = 50000;  // total, burn-in included
  std::size_t burn_in = 10000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  InitMode init = InitMode::Singletons;
  std::optional<Partition> initial;  // used when init == Given
  /// Checked between sweeps; when set the chain stops and returns what it has.
  const std::atomic<bool>* interrupt = nullptr;

  void validate() const;
};

struct ChainStats {
  std::size_t sweeps_done = 0;
  double seconds = 0.0;
  /// Times a DM new-cluster slot received zero weight because H = max_clusters.
  std::size_t saturated_proposals = 0;
  double tracked_loglik = 0.0;
  double recomputed_loglik = 0.0;
};

/// Block-probability point estimates (a + m) / (a + b + m + mbar).
struct ThetaEstimate {
  std::size_t clusters = 0;
  std::vector<double> values;  // row-major H x H, symmetric

  double operator()(std::size_t h, std::size_t k) const { return values[h * clusters + k]; }
};

/// log p(Y | z) with the block probabilities integrated out.
double log_marginal_likelihood(const Network& net, const Partition& part, const LikelihoodSpec& lik);

/// Posterior probabilities of z_v = h, h = 0..H (H = new cluster), for a state
/// from which v has been removed. Supervision is optional.
std::vector<double> full_conditional(const BlockState& state, std::size_t v, const PriorSpec& prior,
                                     const LikelihoodSpec& lik, const Supervision* supervision = nullptr);

ThetaEstimate theta_plugin(const Network& net, const Partition& part, const LikelihoodSpec& lik);

namespace detail {

/// Unnormalized log full-conditional weights shared by the sampler, the
/// public full_conditional and prediction. `tally[k]` holds edges from the
/// node to cluster k; `category` < 0 disables supervision.
void conditional_log_weights(const BlockCounts& counts, std::span<const std::size_t> sizes,
                             std::span<const long> tally, std::size_t nodes_placed,
                             const PriorSpec& prior, const LogBetaTable& lbeta,
                             const Supervision* supervision, const BlockState* state, int category,
                             std::span<double> out, std::span<double> log_lik_ratio = {});

std::size_t sample_log_weights(std::span<const double> log_weights, Rng& rng, std::span<double> scratch);

/// Tabulation size for LogBetaTable covering every block of a network.
std::size_t log_beta_capacity(std::size_t nodes);

}  // namespace detail

/// Collapsed Gibbs sampler over partitions: sweeps v = 1..V in order,
/// removing each node and redrawing its cluster from the full conditional.
class GibbsSampler {
 public:
  GibbsSampler(const Network& net, const PriorSpec& prior, const LikelihoodSpec& lik,
               const Supervision* supervision, const Partition& init, std::uint64_t seed);

  void sweep();

  Partition partition() const { return state_.partition(); }
  const BlockState& state() const { return state_; }
  /// Incrementally tracked log p(Y | z).
  double log_likelihood() const { return loglik_; }
  std::size_t saturated_proposals() const { return saturated_; }

 private:
  const Network* net_;
  PriorSpec prior_;
  LikelihoodSpec lik_;
  const Supervision* supervision_;
  BlockState state_;
  LogBetaTable lbeta_;
  Rng rng_;
  double loglik_ = 0.0;
  std::size_t saturated_ = 0;
  std::vector<long> tally_;
  std::vector<double> weights_;
  std::vector<double> lik_ratio_;
  std::vector<double> scratch_;
};

/// Runs one chain and returns the post-burn-in, thinned trace. Bit-reproducible
/// for a given seed.
TraceStore run_chain(const Network& net, const PriorSpec& prior, const LikelihoodSpec& lik,
                     const Supervision* supervision, const SamplerConfig& config,
                     ChainStats* stats = nullptr);

}  // namespace esbm
