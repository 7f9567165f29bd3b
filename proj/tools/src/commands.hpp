#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "esbm/priors.hpp"
#include "esbm/sampler.hpp"

namespace esbm::cli {

struct PriorFlags {
  std::string prior;
  std::optional<double> beta;
  std::optional<int> hbar;
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<double> gamma;
};

struct LikelihoodFlags {
  double a = 1.0;
  double b = 1.0;
};

struct SimulateOptions {
  std::string preset;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sizes;
  std::string out_edges;
  std::string out_truth;
  std::size_t holdout = 0;
  double unseen_fraction = 0.0;
  std::optional<std::uint64_t> holdout_seed;
  std::string out_holdout_edges;
  std::string out_holdout_truth;
};

struct FitOptions {
  std::string network;
  std::optional<std::size_t> nodes;
  std::string attributes;
  double cohesion_alpha = 1.0;
  PriorFlags prior;
  LikelihoodFlags lik;
  std::size_t sweeps = 50000;
  std::size_t burn_in = 10000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  std::string init = "singletons";
  std::size_t chains = 1;
  std::string out;
};

struct SummarizeOptions {
  std::string trace;
  double level = 0.95;
  std::string out_prefix;
  std::string network;
  std::optional<std::size_t> nodes;
  LikelihoodFlags lik;
};

struct PredictOptions {
  std::string network;
  std::optional<std::size_t> nodes;
  std::string trace;
  std::string new_edges;
  PriorFlags prior;
  LikelihoodFlags lik;
  std::string out;
};

struct CompareOptions {
  std::string trace_a;
  std::string trace_b;
};

struct PriorExpectOptions {
  PriorFlags prior;
  std::size_t nodes = 0;
  std::optional<double> target_mean;
};

/// Builds and range-checks a prior from command-line flags.
PriorSpec prior_from_flags(const PriorFlags& flags);
LikelihoodSpec likelihood_from_flags(const LikelihoodFlags& flags);

void run_simulate(const SimulateOptions& options, std::ostream& out);
void run_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
void run_summarize(const SummarizeOptions& options, std::ostream& out, std::ostream& err);
void run_predict(const PredictOptions& options, std::ostream& out);
void run_compare(const CompareOptions& options, std::ostream& out, std::ostream& err);
void run_prior_expect(const PriorExpectOptions& options, std::ostream& out, std::ostream& err);

}  // namespace esbm::cli
