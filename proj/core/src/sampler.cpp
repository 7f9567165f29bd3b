#include "esbm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "esbm/error.hpp"

namespace esbm {

void LikelihoodSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("likelihood hyperparameter a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw ValidationError("likelihood hyperparameter b must be positive");
}

void SamplerConfig::validate() const {
  if (sweeps == 0) throw ValidationError("sweeps must be positive");
  if (burn_in >= sweeps) {
    throw ValidationError("burn-in (" + std::to_string(burn_in) + ") must be smaller than sweeps (" +
                          std::to_string(sweeps) + ")");
  }
  if (thin == 0) throw ValidationError("thin must be >= 1");
  if (init == InitMode::Given && !initial) throw ValidationError("init=given requires an initial partition");
}


double log_marginal_likelihood(const Network& net, const Partition& part, const LikelihoodSpec& lik) {
  lik.validate();
  const BlockCounts counts = block_counts(net, part);
  const double base = log_beta(lik.a, lik.b);
  double out = 0.0;
  for (std::size_t h = 0; h < counts.clusters(); ++h) {
    for (std::size_t k = 0; k <= h; ++k) {
      out += log_beta(lik.a + static_cast<double>(counts.edges(h, k)),
                      lik.b + static_cast<double>(counts.non_edges(h, k))) -
             base;
    }
  }
  return out;
}

namespace detail {

void conditional_log_weights(const BlockCounts& counts, std::span<const std::size_t> sizes,
                             std::span<const long> tally, std::size_t nodes_placed,
                             const PriorSpec& prior, const LogBetaTable& lbeta,
                             const Supervision* supervision, const BlockState* state, int category,
                             std::span<double> out, std::span<double> log_lik_ratio) {
  const std::size_t clusters = sizes.size();
  const bool supervised = supervision != nullptr && category >= 0;
  const auto x = static_cast<std::size_t>(std::max(category, 0));
  for (std::size_t h = 0; h < clusters; ++h) {
    double lik = 0.0;
    for (std::size_t k = 0; k < clusters; ++k) {
      const long m = counts.edges(h, k);
      const long mbar = counts.non_edges(h, k);
      const long r = tally[k];
      const long rbar = static_cast<long>(sizes[k]) - r;
      lik += lbeta(m + r, mbar + rbar) - lbeta(m, mbar);
    }
    double prior_term = prior.log_join_weight(sizes[h], nodes_placed, clusters);
    if (supervised) {
      const auto counts_h = state->category_counts(h);
      prior_term += std::log((static_cast<double>(counts_h[x]) + supervision->cohesion.alpha(x)) /
                             (static_cast<double>(sizes[h]) + supervision->cohesion.alpha0()));
    }
    out[h] = prior_term + lik;
    if (!log_lik_ratio.empty()) log_lik_ratio[h] = lik;
  }
  double lik = 0.0;
  const double empty = lbeta(0, 0);
  for (std::size_t k = 0; k < clusters; ++k) {
    lik += lbeta(tally[k], static_cast<long>(sizes[k]) - tally[k]) - empty;
  }
  double prior_term = prior.log_new_weight(nodes_placed, clusters);
  if (supervised) prior_term += std::log(supervision->cohesion.alpha(x) / supervision->cohesion.alpha0());
  out[clusters] = prior_term + lik;
  if (!log_lik_ratio.empty()) log_lik_ratio[clusters] = lik;
}

std::size_t log_beta_capacity(std::size_t nodes) {
  const std::size_t pairs = nodes * (nodes > 0 ? nodes - 1 : 0) / 2 + 2;
  return std::min<std::size_t>(pairs, std::size_t{1} << 20);
}

std::size_t sample_log_weights(std::span<const double> log_weights, Rng& rng, std::span<double> scratch) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(top)) throw std::logic_error("full conditional has no finite weight");
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    total += std::exp(log_weights[i] - top);
    scratch[i] = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (u < scratch[i]) return i;
  }
  // u == total only through rounding; take the last positive slot.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (std::isfinite(log_weights[i])) return i;
  }
  return 0;
}

}  // namespace detail

std::vector<double> full_conditional(const BlockState& state, std::size_t v, const PriorSpec& prior,
                                     const LikelihoodSpec& lik, const Supervision* supervision) {
  lik.validate();
  if (v >= state.nodes() || state.label(v) != BlockState::kDetached) {
    throw ValidationError("full_conditional requires node " + std::to_string(v + 1) + " to be removed first");
  }
  if (supervision != nullptr && (supervision->attributes == nullptr || state.attributes() == nullptr)) {
    throw ValidationError("supervision requires an attribute table attached to the state");
  }
  const std::size_t clusters = state.clusters();
  std::vector<long> tally(clusters);
  state.tally(v, tally);
  const LogBetaTable lbeta(lik.a, lik.b, detail::log_beta_capacity(state.nodes()));
  std::size_t placed = 0;
  for (auto n : state.sizes()) placed += n;
  const int category = supervision != nullptr ? (*supervision->attributes)[v] : -1;
  std::vector<double> weights(clusters + 1);
  detail::conditional_log_weights(state.counts(), state.sizes(), tally, placed, prior, lbeta, supervision,
                                  &state, category, weights);
  const double norm = log_sum_exp(weights);
  for (auto& w : weights) w = std::exp(w - norm);
  return weights;
}

ThetaEstimate theta_plugin(const Network& net, const Partition& part, const LikelihoodSpec& lik) {
  if (!(lik.a > 0.0) || !(lik.b > 0.0)) throw ValidationError("likelihood hyperparameters must be positive");
  const BlockCounts counts = block_counts(net, part);
  ThetaEstimate out;
  out.clusters = counts.clusters();
  out.values.resize(out.clusters * out.clusters);
  for (std::size_t h = 0; h < out.clusters; ++h) {
    for (std::size_t k = 0; k < out.clusters; ++k) {
      const double m = static_cast<double>(counts.edges(h, k));
      const double mbar = static_cast<double>(counts.non_edges(h, k));
      out.values[h * out.clusters + k] = (lik.a + m) / (lik.a + m + lik.b + mbar);
    }
  }
  return out;
}

GibbsSampler::GibbsSampler(const Network& net, const PriorSpec& prior, const LikelihoodSpec& lik,
                           const Supervision* supervision, const Partition& init, std::uint64_t seed)
    : net_(&net),
      prior_(prior),
      lik_(lik),
      supervision_(supervision),
      state_(net, init, supervision != nullptr ? supervision->attributes : nullptr),
      lbeta_(lik.a, lik.b, detail::log_beta_capacity(net.size())),
      rng_(seed) {
  lik_.validate();
  if (supervision_ != nullptr) {
    if (supervision_->attributes == nullptr) throw ValidationError("supervision requires an attribute table");
    if (supervision_->attributes->categories() > supervision_->cohesion.categories()) {
      throw ValidationError("attribute table has more categories than the cohesion");
    }
  }
  loglik_ = log_marginal_likelihood(net, init, lik);
  const std::size_t slots = net.size() + 1;
  tally_.resize(slots);
  weights_.resize(slots);
  lik_ratio_.resize(slots);
  scratch_.resize(slots);
}

void GibbsSampler::sweep() {
  const std::size_t nodes = net_->size();
  if (nodes < 2) return;
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto old = static_cast<std::size_t>(state_.label(v));
    const bool singleton = state_.sizes()[old] == 1;
    state_.remove_node(v);
    const std::size_t clusters = state_.clusters();
    const std::size_t old_slot = singleton ? clusters : old;
    std::span<long> tally(tally_.data(), clusters);
    state_.tally(v, tally);
    std::span<double> weights(weights_.data(), clusters + 1);
    std::span<double> ratio(lik_ratio_.data(), clusters + 1);
    const int category = supervision_ != nullptr ? (*supervision_->attributes)[v] : -1;
    detail::conditional_log_weights(state_.counts(), state_.sizes(), tally, nodes - 1, prior_, lbeta_,
                                    supervision_, &state_, category, weights, ratio);
    if (weights[clusters] == kLogZero) ++saturated_;
    const std::size_t h = detail::sample_log_weights(weights, rng_, scratch_);
    loglik_ += ratio[h] - ratio[old_slot];
    state_.insert_node(v, h);
  }
}

TraceStore run_chain(const Network& net, const PriorSpec& prior, const LikelihoodSpec& lik,
                     const Supervision* supervision, const SamplerConfig& config, ChainStats* stats) {
  config.validate();
  Partition init;
  switch (config.init) {
    case InitMode::Singletons: init = Partition::singletons(net.size()); break;
    case InitMode::AllInOne: init = Partition::single_cluster(net.size()); break;
    case InitMode::Given:
      if (config.initial->size() != net.size()) throw ValidationError("initial partition has the wrong size");
      init = *config.initial;
      break;
  }
  const auto start = std::chrono::steady_clock::now();
  GibbsSampler sampler(net, prior, lik, supervision, init, config.seed);
  TraceStore trace;
  trace.nodes = net.size();
  {
    std::ostringstream meta;
    meta << "prior=" << prior.describe() << " a=" << lik.a << " b=" << lik.b
         << " supervised=" << (supervision != nullptr ? "yes" : "no") << " sweeps=" << config.sweeps
         << " burn_in=" << config.burn_in << " thin=" << config.thin << " seed=" << config.seed;
    trace.meta = meta.str();
  }
  const std::size_t kept = (config.sweeps - config.burn_in + config.thin - 1) / config.thin;
  trace.samples.reserve(kept);
  trace.loglik.reserve(kept);
  std::size_t done = 0;
  for (std::size_t s = 0; s < config.sweeps; ++s) {
    if (config.interrupt != nullptr && config.interrupt->load(std::memory_order_relaxed)) break;
    sampler.sweep();
    ++done;
    if (s >= config.burn_in && (s - config.burn_in) % config.thin == 0) {
      trace.push(sampler.partition(), sampler.log_likelihood());
    }
  }
  if (stats != nullptr) {
    stats->sweeps_done = done;
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats->saturated_proposals = sampler.saturated_proposals();
    stats->tracked_loglik = sampler.log_likelihood();
    stats->recomputed_loglik = log_marginal_likelihood(net, sampler.partition(), lik);
  }
  return trace;
}

}  // namespace esbm
