#pragma once

// Brute-force reference implementations used by the tests. Everything here is
// written from first principles and avoids the library's fast paths.

#include <cstddef>
#include <span>
#include <vector>

#include "esbm/network.hpp"
#include "esbm/priors.hpp"

namespace esbm::oracle {

/// All set partitions of n items as restricted growth strings (0-based labels).
std::vector<std::vector<int>> set_partitions(std::size_t n);

/// log p(z) by chaining the normalized predictive rule of each prior node by node.
double log_eppf_sequential(const PriorSpec& prior, std::span<const int> labels);

/// Dirichlet-multinomial marginal of the attributes given z, chained one node at a time.
double log_attribute_marginal(std::span<const double> alphas, std::span<const int> labels,
                              std::span<const int> categories);

/// log p(Y | z) from a pair-by-pair tally and lgamma.
double log_lik_direct(const Network& net, std::span<const int> labels, double a, double b);

/// log p(Y | z) with each block probability integrated on a midpoint grid.
double log_lik_grid(const Network& net, std::span<const int> labels, double a, double b,
                    std::size_t grid = 200000);

struct Posterior {
  std::vector<std::vector<int>> partitions;
  std::vector<double> probs;
};

/// Exact posterior over all set partitions. `categories` may be empty; with
/// attributes the prior is p(z) p(X | z).
Posterior exact_posterior(const Network& net, const PriorSpec& prior, double a, double b,
                          std::span<const int> categories = {}, std::span<const double> alphas = {});

/// Co-clustering probabilities, row-major V x V.
std::vector<double> coclustering(const Posterior& posterior, std::size_t nodes);

/// VI in bits from explicit entropies and mutual information.
double vi_entropy(std::span<const int> x, std::span<const int> y);

/// Random network with independent edges of probability p.
Network random_network(std::size_t nodes, double p, unsigned seed);

}  // namespace esbm::oracle
