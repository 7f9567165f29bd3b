#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "esbm/network.hpp"

namespace esbm {

/// Posterior draws of the partition with their log p(Y | z).
struct TraceStore {
  std::size_t nodes = 0;
  std::vector<Partition> samples;
  std::vector<double> loglik;
  std::string meta;  // free-form config echo, not serialized

  std::size_t size() const { return samples.size(); }
  void push(Partition part, double ll);
  /// Throws ValidationError if lengths disagree or a sample has the wrong size.
  void validate() const;
};

// File format: "V=<V> T=<T>" header, then one line per sample holding the
// log-likelihood (17 significant digits) followed by V 1-based labels.
void write_trace(std::ostream& out, const TraceStore& trace);
void write_trace(const std::filesystem::path& path, const TraceStore& trace);
TraceStore read_trace(std::istream& in);
TraceStore read_trace(const std::filesystem::path& path);

/// Effective sample size via Geyer's initial positive sequence.
double effective_sample_size(std::span<const double> chain);

/// Geweke z-score comparing the first 10% and last 50% of the chain, with
/// batch-means variances.
double geweke_z(std::span<const double> chain);

}  // namespace esbm
