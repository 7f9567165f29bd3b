#pragma once

#include <cstddef>
#include <vector>

#include "esbm/network.hpp"
#include "esbm/sampler.hpp"
#include "esbm/trace.hpp"

namespace esbm {

/// Variation of information in bits. Throws ValidationError on size mismatch.
double vi(const Partition& x, const Partition& y);

/// Distinct partitions of a trace with their relative frequencies, in
/// lexicographic order of canonical labels.
struct WeightedPartitions {
  std::vector<Partition> partitions;
  std::vector<double> weights;  // sums to 1
};
WeightedPartitions distinct_partitions(const TraceStore& trace);

/// Posterior expected VI between `candidate` and the trace.
double expected_vi(const Partition& candidate, const WeightedPartitions& posterior);
double expected_vi(const Partition& candidate, const TraceStore& trace);

struct PointEstimateOptions {
  std::size_t max_passes = 50;
  /// Distinct samples above which candidates are screened with the
  /// similarity-matrix lower bound before exact evaluation.
  std::size_t exact_candidate_limit = 3000;
  std::size_t screened_candidates = 200;
  /// Number of best candidates used as greedy seeds.
  std::size_t greedy_starts = 3;
};

struct PointEstimate {
  Partition partition;
  double objective = 0.0;
  std::size_t candidates_evaluated = 0;
  std::size_t greedy_passes = 0;
};

/// Minimizer of the posterior expected VI over sampled partitions and their
/// greedy single-node refinements.
PointEstimate point_estimate(const TraceStore& trace, const PointEstimateOptions& options = {});

struct CredibleBall {
  Partition center;
  double level = 0.95;
  double radius = 0.0;
  Partition bound;
  double mass = 0.0;     // trace mass inside the ball
  bool tie_broken = false;  // several distinct sampled partitions sat on the edge
};

CredibleBall credible_ball(const TraceStore& trace, const Partition& center, double level = 0.95);

struct SimilarityMatrix {
  std::size_t nodes = 0;
  std::vector<double> values;  // row-major V x V

  double operator()(std::size_t v, std::size_t u) const { return values[v * nodes + u]; }
};

SimilarityMatrix similarity_matrix(const TraceStore& trace);

struct HarmonicMeanEstimate {
  double log_marginal = 0.0;
  double standard_error = 0.0;  // batch means on the log scale
  double top_share = 0.0;       // mass carried by the top 1% of inverse-likelihood weights
  bool unstable = false;        // top_share > 0.5
};

/// Harmonic-mean estimate of log p(Y | M) from the stored log-likelihoods.
HarmonicMeanEstimate log_harmonic_marginal(const TraceStore& trace);

/// 2 log B for model a against model b.
double log_bayes_factor(const TraceStore& a, const TraceStore& b);

/// Kass-Raftery reading of 2 log B.
const char* bayes_factor_evidence(double two_log_b);

double deviance(const Network& net, const Partition& part, const LikelihoodSpec& lik);

/// Fraction of dyads where the plug-in prediction (theta >= 1/2 predicts an
/// edge) disagrees with the observed value.
double misclassification(const Network& net, const Partition& part, const LikelihoodSpec& lik);

struct ClusterCountSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Quartiles of H across the trace (linear interpolation between order statistics).
ClusterCountSummary cluster_count_quartiles(const TraceStore& trace);

}  // namespace esbm
