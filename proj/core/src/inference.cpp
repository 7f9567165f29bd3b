#include "esbm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "esbm/error.hpp"

namespace esbm {

namespace {

constexpr double kTie = 1e-12;

// n log n for n = 0..nodes+1.
std::vector<double> xlogx_table(std::size_t nodes) {
  std::vector<double> f(nodes + 2, 0.0);
  for (std::size_t n = 2; n < f.size(); ++n) f[n] = static_cast<double>(n) * std::log(static_cast<double>(n));
  return f;
}

// Sum of f[n] over a multiset of counts, accumulated in increasing n so the
// result does not depend on the order of the cells.
double ordered_sum(std::vector<std::size_t>& hist, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t n = 2; n < hist.size(); ++n) {
    if (hist[n] != 0) {
      s += static_cast<double>(hist[n]) * f[n];
      hist[n] = 0;
    }
  }
  return s;
}

// Sum of n log n over cluster sizes.
double size_entropy_term(const Partition& p, const std::vector<double>& f) {
  std::vector<std::size_t> hist(f.size(), 0);
  for (auto n : p.sizes()) ++hist[n];
  return ordered_sum(hist, f);
}

class VIEvaluator {
 public:
  explicit VIEvaluator(std::size_t nodes) : nodes_(nodes), f_(xlogx_table(nodes)), hist_(f_.size(), 0) {}

  // V * VI in nats.
  double scaled(const Partition& x, const Partition& y, double x_term, double y_term) {
    const std::size_t hx = x.clusters();
    const std::size_t hy = y.clusters();
    table_.assign(hx * hy, 0);
    const auto xl = x.labels();
    const auto yl = y.labels();
    for (std::size_t v = 0; v < nodes_; ++v) {
      ++table_[static_cast<std::size_t>(xl[v]) * hy + static_cast<std::size_t>(yl[v])];
    }
    for (auto n : table_) ++hist_[n];
    const double joint = ordered_sum(hist_, f_);
    return std::max(0.0, x_term + y_term - 2.0 * joint);
  }

  double bits(double scaled_value) const {
    return scaled_value / (static_cast<double>(nodes_) * std::numbers::ln2);
  }

  const std::vector<double>& f() const { return f_; }

 private:
  std::size_t nodes_;
  std::vector<double> f_;
  std::vector<std::size_t> table_;
  std::vector<std::size_t> hist_;
};

void check_nodes(const TraceStore& trace) {
  if (trace.size() == 0) throw ValidationError("trace is empty");
  trace.validate();
}

}  // namespace

double vi(const Partition& x, const Partition& y) {
  if (x.size() != y.size()) {
    throw ValidationError("VI needs partitions of equal size, got " + std::to_string(x.size()) + " and " +
                          std::to_string(y.size()));
  }
  if (x.size() == 0) return 0.0;
  VIEvaluator eval(x.size());
  return eval.bits(eval.scaled(x, y, size_entropy_term(x, eval.f()), size_entropy_term(y, eval.f())));
}

WeightedPartitions distinct_partitions(const TraceStore& trace) {
  check_nodes(trace);
  std::map<std::span<const int>, std::size_t,
           decltype([](std::span<const int> a, std::span<const int> b) {
             return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
           })>
      counts;
  for (const auto& s : trace.samples) ++counts[s.labels()];
  WeightedPartitions out;
  out.partitions.reserve(counts.size());
  out.weights.reserve(counts.size());
  const auto total = static_cast<double>(trace.size());
  for (const auto& [labels, count] : counts) {
    out.partitions.push_back(Partition::from_labels(labels));
    out.weights.push_back(static_cast<double>(count) / total);
  }
  return out;
}

double expected_vi(const Partition& candidate, const WeightedPartitions& posterior) {
  if (posterior.partitions.empty()) throw ValidationError("posterior sample is empty");
  VIEvaluator eval(candidate.size());
  const double c_term = size_entropy_term(candidate, eval.f());
  double s = 0.0;
  for (std::size_t d = 0; d < posterior.partitions.size(); ++d) {
    const Partition& p = posterior.partitions[d];
    if (p.size() != candidate.size()) throw ValidationError("candidate and posterior sizes differ");
    s += posterior.weights[d] * eval.scaled(candidate, p, c_term, size_entropy_term(p, eval.f()));
  }
  return eval.bits(s);
}

double expected_vi(const Partition& candidate, const TraceStore& trace) {
  return expected_vi(candidate, distinct_partitions(trace));
}

namespace {

/// Exact single-node greedy descent on the expected VI against a weighted
/// posterior sample. Keeps, for every posterior partition, the contingency
/// table against the current candidate so each move is scored in O(D).
class GreedyRefiner {
 public:
  GreedyRefiner(const WeightedPartitions& posterior, const Partition& start)
      : post_(posterior), nodes_(start.size()), f_(xlogx_table(start.size())) {
    labels_.assign(start.labels().begin(), start.labels().end());
    capacity_ = start.clusters() + 4;
    sizes_.assign(capacity_, 0);
    for (int l : labels_) ++sizes_[static_cast<std::size_t>(l)];
    offsets_.resize(post_.partitions.size() + 1, 0);
    rebuild();
  }

  std::size_t run(std::size_t max_passes) {
    std::size_t passes = 0;
    std::vector<double> gain;
    while (passes < max_passes) {
      ++passes;
      bool moved = false;
      for (std::size_t v = 0; v < nodes_; ++v) {
        if (try_move(v, gain)) moved = true;
      }
      if (!moved) break;
    }
    return passes;
  }

  Partition partition() const { return Partition::from_labels(labels_); }

 private:
  std::uint32_t& cell(std::size_t d, std::size_t cluster, std::size_t j) {
    return counts_[offsets_[d] + cluster * post_.partitions[d].clusters() + j];
  }

  void rebuild() {
    for (std::size_t d = 0; d < post_.partitions.size(); ++d) {
      offsets_[d + 1] = offsets_[d] + capacity_ * post_.partitions[d].clusters();
    }
    counts_.assign(offsets_.back(), 0);
    for (std::size_t d = 0; d < post_.partitions.size(); ++d) {
      const auto z = post_.partitions[d].labels();
      for (std::size_t v = 0; v < nodes_; ++v) {
        ++cell(d, static_cast<std::size_t>(labels_[v]), static_cast<std::size_t>(z[v]));
      }
    }
  }

  std::size_t empty_slot() {
    for (std::size_t q = 0; q < capacity_; ++q) {
      if (sizes_[q] == 0) return q;
    }
    capacity_ *= 2;
    sizes_.resize(capacity_, 0);
    rebuild();
    return empty_slot();
  }

  bool try_move(std::size_t v, std::vector<double>& gain) {
    const auto p = static_cast<std::size_t>(labels_[v]);
    std::vector<std::size_t> targets;
    for (std::size_t q = 0; q < capacity_; ++q) {
      if (q != p && sizes_[q] > 0) targets.push_back(q);
    }
    if (sizes_[p] > 1) targets.push_back(empty_slot());
    if (targets.empty()) return false;
    gain.assign(targets.size(), 0.0);
    for (std::size_t d = 0; d < post_.partitions.size(); ++d) {
      const auto j = static_cast<std::size_t>(post_.partitions[d][v]);
      const std::uint32_t np = cell(d, p, j);
      const double leave = f_[np - 1] - f_[np];
      const double w = post_.weights[d];
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const std::uint32_t nq = cell(d, targets[t], j);
        gain[t] += w * (leave + f_[nq + 1] - f_[nq]);
      }
    }
    const double size_leave = f_[sizes_[p] - 1] - f_[sizes_[p]];
    std::size_t best = targets.size();
    double best_delta = -kTie;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const std::size_t q = targets[t];
      const double delta = size_leave + f_[sizes_[q] + 1] - f_[sizes_[q]] - 2.0 * gain[t];
      if (delta < best_delta) {
        best_delta = delta;
        best = t;
      }
    }
    if (best == targets.size()) return false;
    const std::size_t q = targets[best];
    for (std::size_t d = 0; d < post_.partitions.size(); ++d) {
      const auto j = static_cast<std::size_t>(post_.partitions[d][v]);
      --cell(d, p, j);
      ++cell(d, q, j);
    }
    --sizes_[p];
    ++sizes_[q];
    labels_[v] = static_cast<int>(q);
    return true;
  }

  const WeightedPartitions& post_;
  std::size_t nodes_;
  std::vector<double> f_;
  std::vector<int> labels_;
  std::size_t capacity_ = 0;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> counts_;
};

// Lower bound on the expected VI obtained from the posterior similarity matrix.
std::vector<double> vi_lower_bounds(const WeightedPartitions& post, std::size_t nodes) {
  std::vector<double> psm(nodes * nodes, 0.0);
  for (std::size_t d = 0; d < post.partitions.size(); ++d) {
    const auto z = post.partitions[d].labels();
    for (std::size_t v = 0; v < nodes; ++v) {
      for (std::size_t u = 0; u < nodes; ++u) {
        if (z[v] == z[u]) psm[v * nodes + u] += post.weights[d];
      }
    }
  }
  std::vector<double> row_sum(nodes, 0.0);
  for (std::size_t v = 0; v < nodes; ++v) {
    for (std::size_t u = 0; u < nodes; ++u) row_sum[v] += psm[v * nodes + u];
  }
  std::vector<double> out(post.partitions.size());
  for (std::size_t d = 0; d < post.partitions.size(); ++d) {
    const Partition& c = post.partitions[d];
    double s = 0.0;
    for (std::size_t v = 0; v < nodes; ++v) {
      double joint = 0.0;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (c[u] == c[v]) joint += psm[v * nodes + u];
      }
      s += std::log2(static_cast<double>(c.sizes()[static_cast<std::size_t>(c[v])])) + std::log2(row_sum[v]) -
           2.0 * std::log2(joint);
    }
    out[d] = s / static_cast<double>(nodes);
  }
  return out;
}

}  // namespace

PointEstimate point_estimate(const TraceStore& trace, const PointEstimateOptions& options) {
  check_nodes(trace);
  if (trace.nodes > 65535) throw ValidationError("point estimate supports at most 65535 nodes");
  const WeightedPartitions post = distinct_partitions(trace);
  const std::size_t distinct = post.partitions.size();

  std::vector<std::size_t> candidates(distinct);
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  if (distinct > options.exact_candidate_limit) {
    const auto bounds = vi_lower_bounds(post, trace.nodes);
    const std::size_t keep = std::min(options.screened_candidates, distinct);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [&](std::size_t x, std::size_t y) { return bounds[x] < bounds[y] || (bounds[x] == bounds[y] && x < y); });
    candidates.resize(keep);
  }

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (auto idx : candidates) scored.emplace_back(expected_vi(post.partitions[idx], post), idx);
  std::sort(scored.begin(), scored.end());

  PointEstimate best;
  best.candidates_evaluated = scored.size();
  best.partition = post.partitions[scored.front().second];
  best.objective = scored.front().first;
  const std::size_t starts = std::min(std::max<std::size_t>(1, options.greedy_starts), scored.size());
  for (std::size_t s = 0; s < starts; ++s) {
    GreedyRefiner refiner(post, post.partitions[scored[s].second]);
    best.greedy_passes += refiner.run(options.max_passes);
    Partition refined = refiner.partition();
    const double objective = expected_vi(refined, post);
    if (objective < best.objective - kTie ||
        (std::fabs(objective - best.objective) <= kTie && refined < best.partition)) {
      best.objective = objective;
      best.partition = std::move(refined);
    }
  }
  return best;
}

CredibleBall credible_ball(const TraceStore& trace, const Partition& center, double level) {
  check_nodes(trace);
  if (center.size() != trace.nodes) throw ValidationError("credible ball center has the wrong size");
  if (!(level >= 0.0 && level <= 1.0)) throw ValidationError("credible level must lie in [0, 1]");
  const WeightedPartitions post = distinct_partitions(trace);
  VIEvaluator eval(trace.nodes);
  const double c_term = size_entropy_term(center, eval.f());
  std::vector<std::pair<double, std::size_t>> dist(post.partitions.size());
  for (std::size_t d = 0; d < post.partitions.size(); ++d) {
    const Partition& p = post.partitions[d];
    dist[d] = {eval.bits(eval.scaled(center, p, c_term, size_entropy_term(p, eval.f()))), d};
  }
  std::sort(dist.begin(), dist.end());

  CredibleBall ball;
  ball.center = center;
  ball.level = level;
  double mass = 0.0;
  std::size_t i = 0;
  while (i < dist.size()) {
    // Take every partition at this distance together.
    const double radius = dist[i].first;
    std::size_t j = i;
    while (j < dist.size() && dist[j].first <= radius + kTie) mass += post.weights[dist[j++].second];
    ball.radius = radius;
    if (mass >= level - kTie || j == dist.size()) {
      std::size_t pick = dist[i].second;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (post.partitions[dist[k].second] < post.partitions[pick]) pick = dist[k].second;
      }
      ball.bound = post.partitions[pick];
      ball.tie_broken = j - i > 1;
      ball.mass = mass;
      break;
    }
    i = j;
  }
  return ball;
}

SimilarityMatrix similarity_matrix(const TraceStore& trace) {
  check_nodes(trace);
  const std::size_t nodes = trace.nodes;
  std::vector<std::size_t> together(nodes * nodes, 0);
  for (const auto& s : trace.samples) {
    const auto z = s.labels();
    for (std::size_t v = 0; v < nodes; ++v) {
      for (std::size_t u = v + 1; u < nodes; ++u) {
        if (z[v] == z[u]) ++together[v * nodes + u];
      }
    }
  }
  SimilarityMatrix out;
  out.nodes = nodes;
  out.values.assign(nodes * nodes, 0.0);
  const auto total = static_cast<double>(trace.size());
  for (std::size_t v = 0; v < nodes; ++v) {
    out.values[v * nodes + v] = 1.0;
    for (std::size_t u = v + 1; u < nodes; ++u) {
      out.values[v * nodes + u] = out.values[u * nodes + v] = static_cast<double>(together[v * nodes + u]) / total;
    }
  }
  return out;
}

namespace {

double harmonic_log_mean(std::span<const double> loglik) {
  std::vector<double> neg(loglik.size());
  std::transform(loglik.begin(), loglik.end(), neg.begin(), [](double x) { return -x; });
  return std::log(static_cast<double>(loglik.size())) - log_sum_exp(neg);
}

}  // namespace

HarmonicMeanEstimate log_harmonic_marginal(const TraceStore& trace) {
  if (trace.loglik.empty()) throw ValidationError("trace is empty");
  HarmonicMeanEstimate out;
  out.log_marginal = harmonic_log_mean(trace.loglik);

  const std::size_t n = trace.loglik.size();
  constexpr std::size_t kBatches = 20;
  if (n >= 2 * kBatches) {
    const std::size_t len = n / kBatches;
    std::vector<double> est(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
      est[b] = harmonic_log_mean(std::span<const double>(trace.loglik).subspan(b * len, len));
    }
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / kBatches;
    double ss = 0.0;
    for (double e : est) ss += (e - mean) * (e - mean);
    out.standard_error = std::sqrt(ss / (kBatches - 1) / kBatches);
  }

  std::vector<double> w(n);
  const double norm = out.log_marginal - std::log(static_cast<double>(n));  // = -logsumexp(-ll)
  for (std::size_t t = 0; t < n; ++t) w[t] = std::exp(-trace.loglik[t] + norm);
  const std::size_t top = std::max<std::size_t>(1, (n + 99) / 100);
  std::partial_sort(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(top), w.end(), std::greater<>());
  out.top_share = std::accumulate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(top), 0.0);
  out.unstable = out.top_share > 0.5;
  return out;
}

double log_bayes_factor(const TraceStore& a, const TraceStore& b) {
  return 2.0 * (log_harmonic_marginal(a).log_marginal - log_harmonic_marginal(b).log_marginal);
}

const char* bayes_factor_evidence(double two_log_b) {
  const double x = std::fabs(two_log_b);
  if (x < 2.0) return "not worth more than a bare mention";
  if (x < 6.0) return "positive";
  if (x < 10.0) return "strong";
  return "very strong";
}

double deviance(const Network& net, const Partition& part, const LikelihoodSpec& lik) {
  return -log_marginal_likelihood(net, part, lik);
}

double misclassification(const Network& net, const Partition& part, const LikelihoodSpec& lik) {
  const ThetaEstimate theta = theta_plugin(net, part, lik);
  const std::size_t nodes = net.size();
  if (nodes < 2) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t v = 0; v < nodes; ++v) {
    for (std::size_t u = v + 1; u < nodes; ++u) {
      const bool predicted = theta(static_cast<std::size_t>(part[v]), static_cast<std::size_t>(part[u])) >= 0.5;
      if (predicted != net.edge(v, u)) ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(nodes * (nodes - 1) / 2);
}

ClusterCountSummary cluster_count_quartiles(const TraceStore& trace) {
  if (trace.size() == 0) throw ValidationError("trace is empty");
  std::vector<double> h(trace.size());
  for (std::size_t t = 0; t < trace.size(); ++t) h[t] = static_cast<double>(trace.samples[t].clusters());
  std::sort(h.begin(), h.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(h.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, h.size() - 1);
    return h[lo] + (pos - static_cast<double>(lo)) * (h[hi] - h[lo]);
  };
  return {quantile(0.25), quantile(0.5), quantile(0.75)};
}

}  // namespace esbm
