#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "esbm/network.hpp"
#include "esbm/priors.hpp"
#include "esbm/sampler.hpp"

namespace esbm {

/// Plug-in predictive membership probabilities of a new node, h = 0..H
/// (h == H is a new cluster), given its edges to the existing V nodes and the
/// point estimate. Uses the unsupervised urn.
std::vector<double> predict_membership(const Network& net, const Partition& estimate,
                                       const LikelihoodSpec& lik, const PriorSpec& prior,
                                       std::span<const std::uint8_t> new_edges);

/// Held-out scoring. Each estimated cluster is mapped to the majority
/// generative group of its training nodes; a new node predicted into slot H
/// counts as correct iff its group does not occur in the training truth.
double holdout_misclassification(const Partition& estimate, std::span<const int> training_groups,
                                 std::span<const std::size_t> predicted,
                                 std::span<const int> new_groups);

}  // namespace esbm
