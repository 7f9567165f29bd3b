#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "esbm/error.hpp"
#include "esbm/inference.hpp"
#include "esbm/sampler.hpp"
#include "esbm/simulation.hpp"
#include "oracles.hpp"

namespace esbm {
namespace {

TEST(MarginalLikelihood, TwoNodes) {
  const std::vector<Edge> e{{0, 1}};
  const Network net(2, e);
  const LikelihoodSpec lik;
  EXPECT_NEAR(log_marginal_likelihood(net, Partition::single_cluster(2), lik), std::log(0.5), 1e-14);
  EXPECT_NEAR(log_marginal_likelihood(net, Partition::singletons(2), lik), std::log(0.5), 1e-14);
  EXPECT_NEAR(log_marginal_likelihood(Network(2, {}), Partition::singletons(2), lik), std::log(0.5), 1e-14);
}

TEST(MarginalLikelihood, GridIntegrationOracle) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    const Network net = oracle::random_network(5, 0.5, rng());
    std::vector<int> z(5);
    for (auto& x : z) x = static_cast<int>(rng() % 3);
    const Partition p = canonicalize(z);
    for (const auto& lik : {LikelihoodSpec{1.0, 1.0}, LikelihoodSpec{2.0, 3.5}}) {
      const double ref = oracle::log_lik_grid(net, p.labels(), lik.a, lik.b);
      EXPECT_NEAR(log_marginal_likelihood(net, p, lik), ref, 1e-6);
    }
  }
}

TEST(MarginalLikelihood, DirectOracleAndRelabeling) {
  const Network net = oracle::random_network(6, 0.45, 77);
  const LikelihoodSpec lik{0.5, 1.5};
  for (const auto& z : oracle::set_partitions(6)) {
    const double ref = oracle::log_lik_direct(net, z, lik.a, lik.b);
    EXPECT_NEAR(log_marginal_likelihood(net, canonicalize(z), lik), ref, 1e-10);
    std::vector<int> relabeled(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) relabeled[i] = 10 - z[i];
    EXPECT_NEAR(oracle::log_lik_direct(net, relabeled, lik.a, lik.b), ref, 1e-12);
  }
}

struct ConditionalCase {
  PriorSpec prior;
  bool supervised;
};

// The single-site conditional equals Bayes' rule over whole-partition
// evaluations with v moved to each candidate cluster.
TEST(FullConditional, BayesRuleOracle) {
  const std::vector<ConditionalCase> cases{
      {PriorSpec::dirichlet_multinomial(0.5, 4), false}, {PriorSpec::dirichlet_process(1.0), false},
      {PriorSpec::pitman_yor(0.3, 1.0), false},          {PriorSpec::gnedin(0.5), false},
      {PriorSpec::dirichlet_multinomial(1.5, 3), true},  {PriorSpec::dirichlet_process(0.7), true},
      {PriorSpec::pitman_yor(0.5, -0.3), true},          {PriorSpec::gnedin(0.2), true}};
  std::mt19937 rng(99);
  const std::vector<double> alphas{1.0, 0.5, 2.0};
  const LikelihoodSpec lik{1.0, 2.0};
  for (const auto& c : cases) {
    for (std::size_t nodes = 2; nodes <= 7; ++nodes) {
      const Network net = oracle::random_network(nodes, 0.5, rng());
      std::vector<int> cats(nodes);
      for (auto& x : cats) x = static_cast<int>(rng() % 3);
      const AttributeTable attrs(cats, 3);
      const Supervision sup{&attrs, CohesionSpec(alphas)};
      const auto parts = oracle::set_partitions(nodes);
      for (int draw = 0; draw < 12; ++draw) {
        const auto& z = parts[rng() % parts.size()];
        const std::size_t v = rng() % nodes;
        if (c.prior.kind() == PriorKind::DirichletMultinomial &&
            static_cast<int>(canonicalize(z).clusters()) > c.prior.max_clusters()) {
          continue;
        }
        BlockState state(net, canonicalize(z), c.supervised ? &attrs : nullptr);
        state.remove_node(v);
        const auto probs = full_conditional(state, v, c.prior, lik, c.supervised ? &sup : nullptr);

        // Labels of the reduced state, with v assigned to each slot.
        std::vector<double> ref(state.clusters() + 1);
        for (std::size_t h = 0; h <= state.clusters(); ++h) {
          std::vector<int> moved(nodes);
          for (std::size_t u = 0; u < nodes; ++u) moved[u] = u == v ? static_cast<int>(h) : state.label(u);
          const Partition p = canonicalize(moved);
          ref[h] = oracle::log_eppf_sequential(c.prior, p.labels()) +
                   oracle::log_lik_direct(net, p.labels(), lik.a, lik.b);
          if (c.supervised) ref[h] += oracle::log_attribute_marginal(alphas, p.labels(), cats);
        }
        const double norm = log_sum_exp(ref);
        double total = 0.0;
        for (std::size_t h = 0; h < ref.size(); ++h) {
          EXPECT_NEAR(probs[h], std::exp(ref[h] - norm), 1e-10) << c.prior.describe();
          total += probs[h];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(FullConditional, SymmetricClusters) {
  // Node 4 has one edge into each of two identical two-node clusters.
  const std::vector<Edge> e{{0, 1}, {2, 3}, {4, 0}, {4, 2}};
  const Network net(5, e);
  BlockState state(net, canonicalize(std::vector<int>{1, 1, 2, 2, 3}));
  state.remove_node(4);
  const auto p = full_conditional(state, 4, PriorSpec::dirichlet_process(1.0), LikelihoodSpec{});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p[0], p[1]);
}

TEST(FullConditional, RequiresDetachedNode) {
  const Network net = oracle::random_network(4, 0.5, 1);
  BlockState state(net, Partition::singletons(4));
  EXPECT_THROW(full_conditional(state, 1, PriorSpec::gnedin(0.5), LikelihoodSpec{}), ValidationError);
}

TEST(ThetaPlugin, Values) {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {1, 2}};
  // Clusters {0,1,2} and {3,4}: 3 edges and 0 non-edges inside the first,
  // one non-edge inside the second, none across.
  const Network net(5, e);
  const Partition z = canonicalize(std::vector<int>{1, 1, 1, 2, 2});
  const auto t = theta_plugin(net, z, LikelihoodSpec{});
  EXPECT_NEAR(t(0, 0), 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(t(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t(0, 1), 1.0 / 8.0, 1e-15);
  EXPECT_EQ(t(0, 1), t(1, 0));

  const std::vector<Edge> e3{{0, 2}, {0, 3}, {1, 2}};
  const Network net3(4, e3);
  const auto t3 = theta_plugin(net3, canonicalize(std::vector<int>{1, 1, 2, 2}), LikelihoodSpec{});
  EXPECT_NEAR(t3(0, 1), 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(t3(0, 0), 1.0 / 3.0, 1e-15);

  const auto t4 = theta_plugin(Network(2, {}), Partition::singletons(2), LikelihoodSpec{});
  EXPECT_NEAR(t4(0, 0), 0.5, 1e-15);
  const auto t5 = theta_plugin(net3, canonicalize(std::vector<int>{1, 1, 2, 2}), LikelihoodSpec{1e-8, 1e-8});
  EXPECT_NEAR(t5(0, 1), 0.75, 1e-8);
}

TEST(Chain, Reproducible) {
  const auto sim = generate(preset("scenario1", 3));
  SamplerConfig config;
  config.sweeps = 300;
  config.burn_in = 100;
  config.thin = 2;
  config.seed = 42;
  const auto prior = PriorSpec::gnedin(0.45);
  const auto a = run_chain(sim.network, prior, LikelihoodSpec{}, nullptr, config);
  const auto b = run_chain(sim.network, prior, LikelihoodSpec{}, nullptr, config);
  std::ostringstream sa;
  std::ostringstream sb;
  write_trace(sa, a);
  write_trace(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.size(), 100u);
  config.seed = 43;
  std::ostringstream sc;
  write_trace(sc, run_chain(sim.network, prior, LikelihoodSpec{}, nullptr, config));
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Chain, TrackedLikelihoodMatchesRecount) {
  const auto sim = generate(preset("scenario2", 5));
  const AttributeTable attrs = AttributeTable::from_labels(sim.truth.labels());
  const Supervision sup{&attrs, CohesionSpec::uniform(attrs.categories())};
  for (const Supervision* s : {static_cast<const Supervision*>(nullptr), &sup}) {
    SamplerConfig config;
    config.sweeps = 400;
    config.burn_in = 0;
    ChainStats stats;
    const auto trace = run_chain(sim.network, PriorSpec::dirichlet_process(1.0), LikelihoodSpec{2, 2}, s, config, &stats);
    EXPECT_NEAR(stats.tracked_loglik, stats.recomputed_loglik, 1e-8);
    for (std::size_t t = 0; t < trace.size(); t += 97) {
      EXPECT_NEAR(trace.loglik[t], log_marginal_likelihood(sim.network, trace.samples[t], LikelihoodSpec{2, 2}), 1e-8);
    }
  }
}

TEST(Chain, RecoversSeparatedBlocks) {
  GeneratorSpec spec;
  spec.sizes = {14, 14, 12};
  spec.theta.assign(9, 0.01);
  for (int g = 0; g < 3; ++g) spec.theta[static_cast<std::size_t>(g * 4)] = 0.99;
  spec.seed = 12;
  const auto sim = generate(spec);
  SamplerConfig config;
  config.sweeps = 600;
  config.burn_in = 100;
  const auto trace = run_chain(sim.network, PriorSpec::gnedin(0.5), LikelihoodSpec{}, nullptr, config);
  std::map<std::vector<int>, int> freq;
  for (const auto& p : trace.samples) ++freq[{p.labels().begin(), p.labels().end()}];
  auto mode = freq.begin();
  for (auto it = freq.begin(); it != freq.end(); ++it) {
    if (it->second > mode->second) mode = it;
  }
  EXPECT_EQ(canonicalize(mode->first), sim.truth);
}

TEST(Chain, InterruptYieldsValidTrace) {
  const auto sim = generate(preset("scenario1", 1));
  std::atomic<bool> stop{true};
  SamplerConfig config;
  config.sweeps = 100;
  config.burn_in = 10;
  config.interrupt = &stop;
  ChainStats stats;
  const auto trace = run_chain(sim.network, PriorSpec::gnedin(0.4), LikelihoodSpec{}, nullptr, config, &stats);
  EXPECT_EQ(stats.sweeps_done, 0u);
  EXPECT_NO_THROW(trace.validate());
  EXPECT_EQ(trace.size(), 0u);
}

TEST(Chain, DirichletMultinomialSaturation) {
  const auto sim = generate(preset("scenario1", 2));
  SamplerConfig config;
  config.sweeps = 40;
  config.burn_in = 0;
  config.init = InitMode::AllInOne;
  ChainStats stats;
  const auto prior = PriorSpec::dirichlet_multinomial(1.0, 3);
  const auto trace = run_chain(sim.network, prior, LikelihoodSpec{}, nullptr, config, &stats);
  EXPECT_GT(stats.saturated_proposals, 0u);
  for (const auto& p : trace.samples) EXPECT_LE(p.clusters(), 3u);
}

TEST(Chain, DirichletMultinomialOversizedStartShrinks) {
  // Starting above Hbar, no new cluster can open, so H never grows until it fits.
  const auto sim = generate(preset("scenario1", 2));
  SamplerConfig config;
  config.sweeps = 60;
  config.burn_in = 0;
  const auto prior = PriorSpec::dirichlet_multinomial(1.0, 3);
  const auto trace = run_chain(sim.network, prior, LikelihoodSpec{}, nullptr, config, nullptr);
  std::size_t previous = sim.network.size();
  for (const auto& p : trace.samples) {
    if (previous > 3) {
      EXPECT_LE(p.clusters(), previous);
    } else {
      EXPECT_LE(p.clusters(), 3u);
    }
    previous = p.clusters();
  }
}

TEST(SamplerConfig, Validation) {
  SamplerConfig c;
  c.sweeps = 10;
  c.burn_in = 10;
  EXPECT_THROW(c.validate(), ValidationError);
  c.burn_in = 0;
  c.thin = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c.thin = 1;
  c.init = InitMode::Given;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW((LikelihoodSpec{0.0, 1.0}.validate()), ValidationError);
}

}  // namespace
}  // namespace esbm
