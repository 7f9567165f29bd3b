#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace esbm {

// Node indices and cluster labels are 0-based in the C++ API. Files and the
// command line use 1-based ids; conversion happens in io.hpp.

using Edge = std::pair<std::size_t, std::size_t>;

/// Binary undirected network without self-loops. Immutable after construction.
class Network {
 public:
  Network() = default;
  /// Duplicate pairs and both orientations are collapsed. Throws
  /// ValidationError on self-loops, out-of-range endpoints or zero nodes.
  Network(std::size_t nodes, std::span<const Edge> edges);

  std::size_t size() const { return nodes_; }
  std::size_t edge_count() const { return edge_count_; }

  bool edge(std::size_t v, std::size_t u) const { return adjacency_[v * nodes_ + u] != 0; }
  std::span<const std::uint8_t> row(std::size_t v) const {
    return {adjacency_.data() + v * nodes_, nodes_};
  }
  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  /// Edges as (v, u) with v < u, in lexicographic order.
  std::vector<Edge> edges() const;

  bool operator==(const Network& other) const {
    return nodes_ == other.nodes_ && adjacency_ == other.adjacency_;
  }

 private:
  std::size_t nodes_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> neighbors_;
};

/// Partition of nodes in canonical form: labels 0..H-1 with first occurrences
/// in increasing order, no empty clusters.
class Partition {
 public:
  Partition() = default;

  /// Canonicalizes arbitrary integer labels (order of first appearance).
  static Partition from_labels(std::span<const int> raw);
  static Partition singletons(std::size_t nodes);
  static Partition single_cluster(std::size_t nodes);

  std::size_t size() const { return labels_.size(); }
  std::size_t clusters() const { return sizes_.size(); }
  int operator[](std::size_t v) const { return labels_[v]; }
  std::span<const int> labels() const { return labels_; }
  std::span<const std::size_t> sizes() const { return sizes_; }

  bool operator==(const Partition& other) const { return labels_ == other.labels_; }
  /// Lexicographic order on canonical label vectors.
  std::strong_ordering operator<=>(const Partition& other) const {
    return labels_ <=> other.labels_;
  }

 private:
  std::vector<int> labels_;
  std::vector<std::size_t> sizes_;
};

/// Same as Partition::from_labels; throws ValidationError on empty input.
Partition canonicalize(std::span<const int> raw);

/// Single categorical attribute per node, categories 0..C-1.
class AttributeTable {
 public:
  AttributeTable() = default;
  AttributeTable(std::vector<int> values, std::size_t categories);
  /// Maps raw labels to categories in order of first appearance.
  static AttributeTable from_labels(std::span<const int> raw);

  std::size_t size() const { return values_.size(); }
  std::size_t categories() const { return categories_; }
  int operator[](std::size_t v) const { return values_[v]; }
  std::span<const int> values() const { return values_; }

 private:
  std::vector<int> values_;
  std::size_t categories_ = 0;
};

/// Symmetric edge / non-edge tallies between clusters. Storage uses a fixed
/// row stride so clusters can be appended without reallocation.
class BlockCounts {
 public:
  BlockCounts() = default;
  BlockCounts(std::size_t clusters, std::size_t capacity);

  std::size_t clusters() const { return clusters_; }
  long edges(std::size_t h, std::size_t k) const { return edges_[h * stride_ + k]; }
  long non_edges(std::size_t h, std::size_t k) const { return non_edges_[h * stride_ + k]; }

  void add(std::size_t h, std::size_t k, long edges, long non_edges);
  void append_cluster();
  /// Drops cluster h, shifting higher clusters down by one.
  void erase_cluster(std::size_t h);

  bool operator==(const BlockCounts& other) const;

 private:
  std::size_t clusters_ = 0;
  std::size_t stride_ = 0;
  std::vector<long> edges_;
  std::vector<long> non_edges_;
};

/// Exact tallies from scratch. Throws ValidationError on size mismatch.
BlockCounts block_counts(const Network& net, const Partition& part);

/// Mutable single-chain state: labels, cluster sizes, block tallies and, when
/// attributes are attached, per-cluster category counts. Labels stay
/// contiguous; removing the last node of a cluster deletes it and shifts
/// higher labels down.
class BlockState {
 public:
  static constexpr int kDetached = -1;

  BlockState(const Network& net, const Partition& part, const AttributeTable* attributes = nullptr);

  std::size_t nodes() const { return labels_.size(); }
  std::size_t clusters() const { return sizes_.size(); }
  int label(std::size_t v) const { return labels_[v]; }
  std::span<const std::size_t> sizes() const { return sizes_; }
  const BlockCounts& counts() const { return counts_; }
  /// Category counts n_hc of cluster h (empty when no attributes attached).
  std::span<const std::size_t> category_counts(std::size_t h) const;
  const AttributeTable* attributes() const { return attributes_; }
  const Network& network() const { return *net_; }

  /// Edges from v to every current cluster (v itself excluded), written to
  /// out[0..H-1].
  void tally(std::size_t v, std::span<long> out) const;

  void remove_node(std::size_t v);
  /// h in 0..H; h == H opens a new cluster.
  void insert_node(std::size_t v, std::size_t h);

  /// Canonical partition; requires no detached node.
  Partition partition() const;

  /// Compares incremental tallies to a from-scratch recount.
  bool consistent() const;

 private:
  const Network* net_;
  const AttributeTable* attributes_;
  std::vector<int> labels_;
  std::vector<std::size_t> sizes_;
  BlockCounts counts_;
  std::vector<std::size_t> categories_;  // H x C, row stride C
  std::vector<long> scratch_;
};

}  // namespace esbm
