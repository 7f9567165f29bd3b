#include "esbm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "esbm/error.hpp"
#include "esbm/random.hpp"

namespace esbm {

std::size_t GeneratorSpec::nodes() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

void GeneratorSpec::validate() const {
  const std::size_t h = sizes.size();
  if (h == 0) throw ValidationError("generator needs at least one group");
  for (auto n : sizes) {
    if (n == 0) throw ValidationError("generator group sizes must be positive");
  }
  if (theta.size() != h * h) throw ValidationError("block probability matrix must be H0 x H0");
  for (std::size_t g = 0; g < h; ++g) {
    for (std::size_t k = 0; k < h; ++k) {
      const double p = prob(g, k);
      if (!(p > 0.0 && p < 1.0)) throw ValidationError("block probabilities must lie in (0, 1)");
      if (p != prob(k, g)) throw ValidationError("block probability matrix must be symmetric");
    }
  }
  if (!unseen.empty() && unseen.size() != h) throw ValidationError("unseen-group row must have H0 entries");
  for (double p : unseen) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("unseen-group probabilities must lie in (0, 1)");
  }
}

namespace {

std::vector<int> group_of_nodes(const GeneratorSpec& spec) {
  std::vector<int> groups;
  groups.reserve(spec.nodes());
  for (std::size_t g = 0; g < spec.groups(); ++g) groups.insert(groups.end(), spec.sizes[g], static_cast<int>(g));
  return groups;
}

}  // namespace

SimulatedNetwork generate(const GeneratorSpec& spec) {
  spec.validate();
  const std::vector<int> groups = group_of_nodes(spec);
  const std::size_t nodes = groups.size();
  Rng rng(spec.seed);
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < nodes; ++v) {
    for (std::size_t u = v + 1; u < nodes; ++u) {
      const double p = spec.prob(static_cast<std::size_t>(groups[v]), static_cast<std::size_t>(groups[u]));
      if (uniform01(rng) < p) edges.emplace_back(v, u);
    }
  }
  return {Network(nodes, edges), Partition::from_labels(groups)};
}

GeneratorSpec preset(std::string_view name, std::uint64_t seed) {
  constexpr double hi = 0.75;
  constexpr double lo = 0.25;
  GeneratorSpec spec;
  spec.seed = seed;
  auto fill = [&spec, lo](std::initializer_list<std::size_t> sizes) {
    spec.sizes = sizes;
    spec.theta.assign(spec.sizes.size() * spec.sizes.size(), lo);
    spec.unseen.assign(spec.sizes.size(), lo);
  };
  auto set = [&spec](std::size_t g, std::size_t k, double p) {
    spec.theta[g * spec.sizes.size() + k] = p;
    spec.theta[k * spec.sizes.size() + g] = p;
  };
  if (name == "scenario1") {
    // Five communities of decreasing size.
    fill({28, 20, 14, 10, 8});
    for (std::size_t g = 0; g < 5; ++g) set(g, g, hi);
  } else if (name == "scenario2") {
    // Members A, members B, leaders A, leaders B, top leaders.
    fill({30, 30, 8, 8, 4});
    set(0, 0, hi);
    set(1, 1, hi);
    set(2, 0, hi);
    set(3, 1, hi);
    set(2, 4, hi);
    set(3, 4, hi);
    set(2, 2, hi);
    set(3, 3, hi);
    set(4, 4, hi);
  } else if (name == "scenario3" || name == "scenario3-strict") {
    // Members of three units, leaders of units 1-2, leaders of unit 3.
    fill({25, 25, 18, 8, 4});
    set(0, 0, hi);
    set(1, 1, hi);
    set(2, 2, hi);
    set(0, 3, hi);
    set(1, 3, hi);
    set(2, 4, hi);
    set(3, 4, name == "scenario3" ? 0.45 : hi);
  } else {
    throw ValidationError("unknown preset '" + std::string(name) +
                          "' (expected scenario1, scenario2, scenario3 or scenario3-strict)");
  }
  return spec;
}

HoldoutNodes generate_holdout(const GeneratorSpec& spec, std::size_t count, double unseen_fraction,
                              std::uint64_t seed) {
  spec.validate();
  if (!(unseen_fraction >= 0.0 && unseen_fraction <= 1.0)) {
    throw ValidationError("unseen fraction must lie in [0, 1]");
  }
  const auto unseen = static_cast<std::size_t>(std::llround(static_cast<double>(count) * unseen_fraction));
  if (unseen > 0 && spec.unseen.empty()) throw ValidationError("generator has no unseen-group row");
  const std::size_t existing = count - unseen;

  // Largest-remainder allocation of the existing-group nodes.
  const std::size_t total = spec.nodes();
  std::vector<std::size_t> alloc(spec.groups());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < spec.groups(); ++g) {
    const double exact = static_cast<double>(existing) * static_cast<double>(spec.sizes[g]) / static_cast<double>(total);
    alloc[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += alloc[g];
    remainders.emplace_back(-(exact - std::floor(exact)), g);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; assigned < existing; ++i, ++assigned) ++alloc[remainders[i % remainders.size()].second];

  HoldoutNodes out;
  for (std::size_t g = 0; g < spec.groups(); ++g) out.groups.insert(out.groups.end(), alloc[g], static_cast<int>(g));
  out.groups.insert(out.groups.end(), unseen, static_cast<int>(spec.groups()));

  const std::vector<int> groups = group_of_nodes(spec);
  Rng rng(seed);
  out.edges.reserve(count);
  for (int g : out.groups) {
    std::vector<std::uint8_t> row(total, 0);
    for (std::size_t u = 0; u < total; ++u) {
      const auto k = static_cast<std::size_t>(groups[u]);
      const double p = static_cast<std::size_t>(g) == spec.groups() ? spec.unseen[k]
                                                                    : spec.prob(static_cast<std::size_t>(g), k);
      row[u] = uniform01(rng) < p ? 1 : 0;
    }
    out.edges.push_back(std::move(row));
  }
  return out;
}

}  // namespace esbm
