#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "esbm/error.hpp"
#include "esbm/simulation.hpp"

namespace esbm {
namespace {

struct Density {
  double edges = 0;
  double pairs = 0;
  double rate() const { return edges / pairs; }
  double sd(double p) const { return std::sqrt(p * (1 - p) / pairs); }
};

TEST(Generate, HomogeneousDensity) {
  GeneratorSpec spec;
  spec.sizes = {60, 40};
  spec.theta.assign(4, 0.5);
  spec.seed = 8;
  const auto sim = generate(spec);
  const double pairs = 100.0 * 99.0 / 2.0;
  const double rate = static_cast<double>(sim.network.edge_count()) / pairs;
  EXPECT_LE(std::fabs(rate - 0.5), 3.0 * std::sqrt(0.25 / pairs));
}

TEST(Generate, ScenarioOneBlockDensities) {
  const auto spec = preset("scenario1", 5);
  const auto sim = generate(spec);
  Density within;
  Density across;
  for (std::size_t v = 0; v < sim.network.size(); ++v) {
    for (std::size_t u = v + 1; u < sim.network.size(); ++u) {
      auto& d = sim.truth[v] == sim.truth[u] ? within : across;
      d.pairs += 1;
      d.edges += sim.network.edge(v, u);
    }
  }
  EXPECT_LE(std::fabs(within.rate() - 0.75), 3 * within.sd(0.75));
  EXPECT_LE(std::fabs(across.rate() - 0.25), 3 * across.sd(0.25));
}

TEST(Generate, Deterministic) {
  const auto a = generate(preset("scenario2", 7));
  const auto b = generate(preset("scenario2", 7));
  const auto c = generate(preset("scenario2", 8));
  EXPECT_EQ(a.network, b.network);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_FALSE(a.network == c.network);
}

TEST(Preset, Shapes) {
  for (const char* name : {"scenario1", "scenario2", "scenario3", "scenario3-strict"}) {
    const auto spec = preset(name);
    EXPECT_EQ(spec.nodes(), 80u) << name;
    EXPECT_EQ(spec.groups(), 5u) << name;
    EXPECT_NO_THROW(spec.validate());
    for (double p : spec.theta) EXPECT_TRUE(p == 0.25 || p == 0.75 || p == 0.45) << name;
  }
  EXPECT_EQ(preset("scenario1").sizes, (std::vector<std::size_t>{28, 20, 14, 10, 8}));
  EXPECT_EQ(preset("scenario2").sizes, (std::vector<std::size_t>{30, 30, 8, 8, 4}));
  EXPECT_EQ(preset("scenario3").sizes, (std::vector<std::size_t>{25, 25, 18, 8, 4}));
  EXPECT_EQ(preset("scenario3").prob(3, 4), 0.45);
  EXPECT_EQ(preset("scenario3-strict").prob(3, 4), 0.75);
  EXPECT_EQ(preset("scenario2").prob(2, 0), 0.75);
  EXPECT_EQ(preset("scenario2").prob(2, 1), 0.25);
  EXPECT_THROW(preset("scenario9"), ValidationError);
}

TEST(GeneratorSpec, Validation) {
  GeneratorSpec spec;
  spec.sizes = {2, 2};
  spec.theta = {0.5, 0.2, 0.3, 0.5};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.theta = {0.5, 0.2, 0.2, 1.0};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.theta = {0.5, 0.2, 0.2};
  EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(Holdout, Allocation) {
  const auto spec = preset("scenario1", 1);
  const auto h = generate_holdout(spec, 300, 50.0 / 300.0, 9);
  ASSERT_EQ(h.groups.size(), 300u);
  ASSERT_EQ(h.edges.size(), 300u);
  std::vector<int> counts(6, 0);
  for (int g : h.groups) ++counts[static_cast<std::size_t>(g)];
  EXPECT_EQ(counts[5], 50);
  // 250 nodes split as 28:20:14:10:8 of 80 by largest remainder.
  EXPECT_EQ(counts, (std::vector<int>{88, 62, 44, 31, 25, 50}));
  for (const auto& row : h.edges) EXPECT_EQ(row.size(), 80u);
  const auto again = generate_holdout(spec, 300, 50.0 / 300.0, 9);
  EXPECT_EQ(again.edges, h.edges);
  EXPECT_THROW(generate_holdout(spec, 10, 1.5, 1), ValidationError);
}

}  // namespace
}  // namespace esbm
