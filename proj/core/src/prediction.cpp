#include "esbm/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "esbm/error.hpp"

namespace esbm {

std::vector<double> predict_membership(const Network& net, const Partition& estimate,
                                       const LikelihoodSpec& lik, const PriorSpec& prior,
                                       std::span<const std::uint8_t> new_edges) {
  lik.validate();
  if (new_edges.size() != net.size()) {
    throw ValidationError("new node has " + std::to_string(new_edges.size()) + " edge indicators, network has " +
                          std::to_string(net.size()) + " nodes");
  }
  if (estimate.size() != net.size()) throw ValidationError("point estimate does not match the network size");
  const BlockCounts counts = block_counts(net, estimate);
  const std::size_t clusters = estimate.clusters();
  std::vector<long> tally(clusters, 0);
  for (std::size_t u = 0; u < new_edges.size(); ++u) {
    if (new_edges[u] > 1) throw ValidationError("new-node edge indicators must be 0 or 1");
    if (new_edges[u]) ++tally[static_cast<std::size_t>(estimate[u])];
  }
  const LogBetaTable lbeta(lik.a, lik.b, detail::log_beta_capacity(net.size() + 1));
  std::vector<double> weights(clusters + 1);
  detail::conditional_log_weights(counts, estimate.sizes(), tally, net.size(), prior, lbeta, nullptr, nullptr, -1,
                                  weights);
  const double norm = log_sum_exp(weights);
  for (auto& w : weights) w = std::exp(w - norm);
  return weights;
}

double holdout_misclassification(const Partition& estimate, std::span<const int> training_groups,
                                 std::span<const std::size_t> predicted, std::span<const int> new_groups) {
  if (training_groups.size() != estimate.size()) throw ValidationError("training truth does not match the estimate");
  if (predicted.size() != new_groups.size()) throw ValidationError("prediction and truth lengths differ");
  if (predicted.empty()) return 0.0;
  const std::size_t clusters = estimate.clusters();
  std::vector<std::map<int, std::size_t>> tallies(clusters);
  for (std::size_t v = 0; v < estimate.size(); ++v) {
    ++tallies[static_cast<std::size_t>(estimate[v])][training_groups[v]];
  }
  std::vector<int> majority(clusters);
  for (std::size_t h = 0; h < clusters; ++h) {
    std::size_t best = 0;
    for (const auto& [group, count] : tallies[h]) {
      if (count > best) {
        best = count;
        majority[h] = group;
      }
    }
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool unseen = std::find(training_groups.begin(), training_groups.end(), new_groups[i]) == training_groups.end();
    const bool correct = unseen ? predicted[i] == clusters
                                : predicted[i] < clusters && majority[predicted[i]] == new_groups[i];
    if (!correct) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

}  // namespace esbm
