#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "esbm/error.hpp"
#include "esbm/priors.hpp"
#include "oracles.hpp"

namespace esbm {
namespace {

std::vector<PriorSpec> family() {
  return {PriorSpec::dirichlet_multinomial(0.5, 4), PriorSpec::dirichlet_multinomial(2.0, 10),
          PriorSpec::dirichlet_process(1.0),        PriorSpec::dirichlet_process(3.0),
          PriorSpec::pitman_yor(0.3, 1.0),          PriorSpec::pitman_yor(0.6, -0.2),
          PriorSpec::gnedin(0.5),                   PriorSpec::gnedin(0.3)};
}

std::vector<std::size_t> sizes_of(const std::vector<int>& z) {
  const int h = *std::max_element(z.begin(), z.end()) + 1;
  std::vector<std::size_t> s(static_cast<std::size_t>(h), 0);
  for (int x : z) ++s[static_cast<std::size_t>(x)];
  return s;
}

std::vector<double> normalized_urn(const PriorSpec& prior, const std::vector<std::size_t>& sizes) {
  std::vector<double> w(sizes.size() + 1);
  for (std::size_t h = 0; h <= sizes.size(); ++h) w[h] = log_urn_weight(prior, h, sizes);
  const double norm = log_sum_exp(w);
  for (auto& x : w) x = std::exp(x - norm);
  return w;
}

TEST(Eppf, SmallValues) {
  for (const auto& p : family()) EXPECT_NEAR(log_eppf(p, std::vector<std::size_t>{1}), 0.0, 1e-14) << p.describe();
  const auto dp = PriorSpec::dirichlet_process(1.0);
  EXPECT_NEAR(log_eppf(dp, std::vector<std::size_t>{3}), std::log(1.0 / 3.0), 1e-12);
  EXPECT_NEAR(log_eppf(dp, std::vector<std::size_t>{1, 1, 1}), std::log(1.0 / 6.0), 1e-12);
  const auto dm = PriorSpec::dirichlet_multinomial(1.0, 2);
  EXPECT_EQ(log_eppf(dm, std::vector<std::size_t>{1, 1, 1}), kLogZero);
}

TEST(Eppf, SumsToOneOverAllPartitions) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto parts = oracle::set_partitions(n);
    for (const auto& p : family()) {
      double total = 0.0;
      for (const auto& z : parts) total += std::exp(log_eppf(p, sizes_of(z)));
      EXPECT_NEAR(total, 1.0, 1e-9) << p.describe() << " V=" << n;
    }
  }
}

TEST(Eppf, MatchesSequentialPredictiveOracle) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (const auto& p : family()) {
      for (const auto& z : oracle::set_partitions(n)) {
        const double ref = oracle::log_eppf_sequential(p, z);
        const double got = log_eppf(p, sizes_of(z));
        if (std::isinf(ref)) {
          EXPECT_EQ(got, kLogZero);
        } else {
          EXPECT_NEAR(got, ref, 1e-10) << p.describe();
        }
      }
    }
  }
}

TEST(Eppf, Exchangeable) {
  for (const auto& p : family()) {
    std::vector<std::size_t> s{4, 1, 2, 1};
    const double ref = log_eppf(p, s);
    std::sort(s.begin(), s.end());
    do {
      EXPECT_EQ(log_eppf(p, s), ref);
    } while (std::next_permutation(s.begin(), s.end()));
  }
}

TEST(Urn, Examples) {
  const auto dp = PriorSpec::dirichlet_process(1.0);
  const auto w = normalized_urn(dp, {2, 1});
  EXPECT_NEAR(w[0], 0.5, 1e-14);
  EXPECT_NEAR(w[1], 0.25, 1e-14);
  EXPECT_NEAR(w[2], 0.25, 1e-14);

  const auto gn = PriorSpec::gnedin(0.3);
  const std::vector<std::size_t> s{3, 2};
  const double a = log_urn_weight(gn, 0, s);
  const double b = log_urn_weight(gn, 1, s);
  const double c = log_urn_weight(gn, 2, s);
  EXPECT_NEAR(std::exp(a - c), 13.2 / 3.4, 1e-12);
  EXPECT_NEAR(std::exp(b - c), 9.9 / 3.4, 1e-12);
}

TEST(Urn, PitmanYorWithoutDiscountIsDirichletProcess) {
  const auto py = PriorSpec::pitman_yor(0.0, 2.5);
  const auto dp = PriorSpec::dirichlet_process(2.5);
  for (const auto& z : oracle::set_partitions(6)) {
    const auto s = sizes_of(z);
    EXPECT_NEAR(log_eppf(py, s), log_eppf(dp, s), 1e-12);
    const auto a = normalized_urn(py, s);
    const auto b = normalized_urn(dp, s);
    for (std::size_t h = 0; h < a.size(); ++h) EXPECT_NEAR(a[h], b[h], 1e-14);
  }
}

TEST(Urn, DirichletMultinomialSaturates) {
  const auto dm = PriorSpec::dirichlet_multinomial(0.5, 2);
  EXPECT_EQ(log_urn_weight(dm, 2, std::vector<std::size_t>{1, 1}), kLogZero);
  EXPECT_EQ(dm.log_new_weight(2, 2), kLogZero);
}

TEST(Urn, ReconstructsEppfSequentially) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& p : family()) {
      for (const auto& z : oracle::set_partitions(n)) {
        double logp = 0.0;
        std::vector<std::size_t> sizes;
        for (int label : z) {
          const auto h = static_cast<std::size_t>(label);
          logp += std::log(normalized_urn(p, sizes)[h]);
          if (h == sizes.size()) sizes.push_back(0);
          ++sizes[h];
        }
        const double eppf = log_eppf(p, sizes);
        if (std::isinf(eppf)) {
          EXPECT_TRUE(std::isinf(logp));
        } else {
          EXPECT_NEAR(std::exp(logp), std::exp(eppf), 1e-9) << p.describe();
        }
      }
    }
  }
}

TEST(Weights, SatisfyRecursion) {
  for (const auto& p : family()) {
    EXPECT_NEAR(p.log_weight(1, 1), 0.0, 1e-14);
    const double sigma = p.discount();
    for (long v = 1; v <= 10; ++v) {
      for (long h = 1; h <= v; ++h) {
        const double lhs = p.log_weight(v, h);
        const double a = p.log_weight(v + 1, h);
        const double b = p.log_weight(v + 1, h + 1);
        const double coef = static_cast<double>(v) - static_cast<double>(h) * sigma;
        const double rhs = std::exp(a) * coef + std::exp(b);
        if (std::isinf(lhs)) {
          EXPECT_EQ(rhs, 0.0) << p.describe();
          continue;
        }
        EXPECT_NEAR(rhs / std::exp(lhs), 1.0, 1e-9) << p.describe() << " V=" << v << " H=" << h;
      }
    }
  }
}

TEST(HDistribution, MatchesEnumeration) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto parts = oracle::set_partitions(n);
    for (const auto& p : family()) {
      std::vector<double> ref(n, 0.0);
      for (const auto& z : parts) {
        const auto s = sizes_of(z);
        ref[s.size() - 1] += std::exp(log_eppf(p, s));
      }
      const auto dist = h_distribution(p, n);
      ASSERT_EQ(dist.pmf.size(), n);
      for (std::size_t h = 0; h < n; ++h) EXPECT_NEAR(dist.pmf[h], ref[h], 1e-9) << p.describe() << " V=" << n;
    }
  }
}

TEST(HDistribution, DefaultHyperparameterMeans) {
  const auto gn = h_distribution(PriorSpec::gnedin(0.45), 80);
  EXPECT_NEAR(gn.mean, 10.0, 1.0);
  double exact = 0.0;
  for (int i = 0; i < 80; ++i) exact += 3.0 / (3.0 + i);
  EXPECT_NEAR(h_distribution(PriorSpec::dirichlet_process(3.0), 80).mean, exact, 1e-9);
  EXPECT_NEAR(h_distribution(PriorSpec::gnedin(0.45), 1).pmf[0], 1.0, 1e-14);
}

TEST(HDistribution, PropertiesAtScale) {
  for (const auto& p : family()) {
    const auto d = h_distribution(p, 120);
    const double total = std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-10) << p.describe();
    for (double x : d.pmf) EXPECT_GE(x, 0.0);
    EXPECT_GE(d.mean, 1.0);
    EXPECT_LE(d.mean, 120.0);
  }
}

TEST(HDistribution, GnedinClosedFormAgrees) {
  for (double g : {0.1, 0.45, 0.9}) {
    const auto a = h_distribution(PriorSpec::gnedin(g), 60);
    const auto b = gnedin_h_distribution(g, 60);
    for (std::size_t h = 0; h < 60; ++h) EXPECT_NEAR(a.pmf[h], b.pmf[h], 1e-10);
  }
}

TEST(HDistribution, GnedinLimitIsPopulationPrior) {
  const auto d = h_distribution(PriorSpec::gnedin(0.45), 2000);
  for (long h = 1; h <= 10; ++h) {
    EXPECT_NEAR(d.pmf[static_cast<std::size_t>(h - 1)], gn_population_pmf(0.45, h), 1e-3) << h;
  }
}

TEST(GnPopulation, Values) {
  EXPECT_NEAR(gn_population_pmf(0.3, 1), 0.3, 1e-15);
  EXPECT_NEAR(gn_population_pmf(0.5, 2), 0.125, 1e-15);
  double total = 0.0;
  for (long h = 1; h <= 10000; ++h) total += gn_population_pmf(0.5, h);
  // The tail beyond 10^4 carries about 0.006 of the mass for gamma = 1/2.
  EXPECT_NEAR(total, 1.0, 1e-2);
  EXPECT_LT(total, 1.0);
}

TEST(Stirling, FirstKind) {
  const auto row = log_stirling_first_row(4);
  const std::vector<double> expected{0, 6, 11, 6, 1};
  EXPECT_EQ(row[0], kLogZero);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_NEAR(std::exp(row[k]), expected[k], 1e-12);
}

TEST(GeneralizedFactorial, SmallRow) {
  // C(2,1) = sigma (1 - sigma), C(2,2) = sigma^2 for sigma = 0.3.
  const auto row = generalized_factorial_row(2, 0.3);
  EXPECT_NEAR(row[1].value(), 0.3 * 0.7, 1e-14);
  EXPECT_NEAR(row[2].value(), 0.09, 1e-14);
  const auto neg = generalized_factorial_row(3, -1.0);
  // sigma = -1 gives signed Lah numbers: -6, 6, -1.
  EXPECT_NEAR(neg[1].value(), -6.0, 1e-12);
  EXPECT_NEAR(neg[2].value(), 6.0, 1e-12);
  EXPECT_NEAR(neg[3].value(), -1.0, 1e-12);
}

TEST(PriorSpec, RangeChecks) {
  try {
    PriorSpec::gnedin(1.2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0, 1)"), std::string::npos);
  }
  EXPECT_THROW(PriorSpec::dirichlet_multinomial(0.0, 3), ValidationError);
  EXPECT_THROW(PriorSpec::dirichlet_multinomial(1.0, 0), ValidationError);
  EXPECT_THROW(PriorSpec::dirichlet_process(-1.0), ValidationError);
  EXPECT_THROW(PriorSpec::pitman_yor(1.0, 1.0), ValidationError);
  EXPECT_THROW(PriorSpec::pitman_yor(0.5, -0.5), ValidationError);
  EXPECT_NO_THROW(PriorSpec::pitman_yor(0.5, -0.4));
}

TEST(Elicitation, HitsTarget) {
  for (const auto& base : {PriorSpec::dirichlet_process(1.0), PriorSpec::gnedin(0.5),
                           PriorSpec::pitman_yor(0.3, 1.0), PriorSpec::dirichlet_multinomial(1.0, 50)}) {
    const auto p = elicit_prior(base, 10.0, 80);
    EXPECT_NEAR(h_distribution(p, 80).mean, 10.0, 1e-6) << p.describe();
    EXPECT_EQ(p.kind(), base.kind());
  }
  EXPECT_THROW(elicit_prior(PriorSpec::dirichlet_process(1.0), 100.0, 80), ValidationError);
}

}  // namespace
}  // namespace esbm
