#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "esbm/network.hpp"

namespace esbm {

/// Planted stochastic block model.
struct GeneratorSpec {
  std::vector<std::size_t> sizes;    // n_1..n_H0, nodes laid out group by group
  std::vector<double> theta;         // H0 x H0 row-major, symmetric, in (0,1)
  std::vector<double> unseen;        // edge probabilities from a held-out group to each group
  std::uint64_t seed = 0;

  std::size_t groups() const { return sizes.size(); }
  std::size_t nodes() const;
  double prob(std::size_t g, std::size_t h) const { return theta[g * sizes.size() + h]; }
  void validate() const;
};

struct SimulatedNetwork {
  Network network;
  Partition truth;
};

SimulatedNetwork generate(const GeneratorSpec& spec);

/// scenario1, scenario2, scenario3 or scenario3-strict.
GeneratorSpec preset(std::string_view name, std::uint64_t seed = 0);

/// New nodes with edges to the existing network only.
struct HoldoutNodes {
  std::vector<std::vector<std::uint8_t>> edges;  // one length-V row per new node
  std::vector<int> groups;                       // generative group; groups() denotes unseen
};

/// Draws `count` new nodes: round(count * unseen_fraction) from an unseen
/// group, the rest allocated to existing groups proportionally to their sizes.
HoldoutNodes generate_holdout(const GeneratorSpec& spec, std::size_t count, double unseen_fraction,
                              std::uint64_t seed);

}  // namespace esbm
