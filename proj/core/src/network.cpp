#include "esbm/network.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "esbm/error.hpp"

namespace esbm {

Network::Network(std::size_t nodes, std::span<const Edge> edges)
    : nodes_(nodes), adjacency_(nodes * nodes, 0), offsets_(nodes + 1, 0) {
  if (nodes == 0) throw ValidationError("network must have at least one node");
  for (const auto& [v, u] : edges) {
    if (v >= nodes || u >= nodes) {
      throw ValidationError("edge (" + std::to_string(v + 1) + ", " + std::to_string(u + 1) +
                            ") references a node outside 1.." + std::to_string(nodes));
    }
    if (v == u) throw ValidationError("self-loop at node " + std::to_string(v + 1));
    if (adjacency_[v * nodes + u] == 0) ++edge_count_;
    adjacency_[v * nodes + u] = 1;
    adjacency_[u * nodes + v] = 1;
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto r = row(v);
    offsets_[v + 1] = offsets_[v] + static_cast<std::size_t>(std::count(r.begin(), r.end(), 1));
  }
  neighbors_.reserve(offsets_[nodes]);
  for (std::size_t v = 0; v < nodes; ++v) {
    for (std::size_t u = 0; u < nodes; ++u) {
      if (adjacency_[v * nodes + u]) neighbors_.push_back(static_cast<std::uint32_t>(u));
    }
  }
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t v = 0; v < nodes_; ++v) {
    for (auto u : neighbors(v)) {
      if (u > v) out.emplace_back(v, u);
    }
  }
  return out;
}

Partition Partition::from_labels(std::span<const int> raw) {
  if (raw.empty()) throw ValidationError("cannot canonicalize an empty label vector");
  Partition part;
  part.labels_.resize(raw.size());
  std::unordered_map<int, int> relabel;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    auto [it, inserted] = relabel.try_emplace(raw[v], static_cast<int>(relabel.size()));
    if (inserted) part.sizes_.push_back(0);
    part.labels_[v] = it->second;
    ++part.sizes_[static_cast<std::size_t>(it->second)];
  }
  return part;
}

Partition Partition::singletons(std::size_t nodes) {
  std::vector<int> raw(nodes);
  for (std::size_t v = 0; v < nodes; ++v) raw[v] = static_cast<int>(v);
  return from_labels(raw);
}

Partition Partition::single_cluster(std::size_t nodes) {
  std::vector<int> raw(nodes, 0);
  return from_labels(raw);
}

Partition canonicalize(std::span<const int> raw) { return Partition::from_labels(raw); }

AttributeTable::AttributeTable(std::vector<int> values, std::size_t categories)
    : values_(std::move(values)), categories_(categories) {
  if (categories_ == 0) throw ValidationError("attribute table needs at least one category");
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (values_[v] < 0 || static_cast<std::size_t>(values_[v]) >= categories_) {
      throw ValidationError("attribute of node " + std::to_string(v + 1) + " is out of range");
    }
  }
}

AttributeTable AttributeTable::from_labels(std::span<const int> raw) {
  const Partition mapped = Partition::from_labels(raw);
  return AttributeTable(std::vector<int>(mapped.labels().begin(), mapped.labels().end()),
                        mapped.clusters());
}

BlockCounts::BlockCounts(std::size_t clusters, std::size_t capacity)
    : clusters_(clusters),
      stride_(std::max(clusters, capacity)),
      edges_(stride_ * stride_, 0),
      non_edges_(stride_ * stride_, 0) {}

void BlockCounts::add(std::size_t h, std::size_t k, long edges, long non_edges) {
  edges_[h * stride_ + k] += edges;
  non_edges_[h * stride_ + k] += non_edges;
  if (h != k) {
    edges_[k * stride_ + h] += edges;
    non_edges_[k * stride_ + h] += non_edges;
  }
}

void BlockCounts::append_cluster() {
  if (clusters_ == stride_) {
    const std::size_t stride = std::max<std::size_t>(1, 2 * stride_);
    std::vector<long> e(stride * stride, 0), n(stride * stride, 0);
    for (std::size_t h = 0; h < clusters_; ++h) {
      for (std::size_t k = 0; k < clusters_; ++k) {
        e[h * stride + k] = edges_[h * stride_ + k];
        n[h * stride + k] = non_edges_[h * stride_ + k];
      }
    }
    edges_ = std::move(e);
    non_edges_ = std::move(n);
    stride_ = stride;
  }
  for (std::size_t k = 0; k <= clusters_; ++k) {
    edges_[clusters_ * stride_ + k] = edges_[k * stride_ + clusters_] = 0;
    non_edges_[clusters_ * stride_ + k] = non_edges_[k * stride_ + clusters_] = 0;
  }
  ++clusters_;
}

void BlockCounts::erase_cluster(std::size_t h) {
  for (std::size_t r = 0; r < clusters_; ++r) {
    long* e = edges_.data() + r * stride_;
    long* n = non_edges_.data() + r * stride_;
    std::copy(e + h + 1, e + clusters_, e + h);
    std::copy(n + h + 1, n + clusters_, n + h);
  }
  for (std::size_t r = h; r + 1 < clusters_; ++r) {
    std::copy_n(edges_.data() + (r + 1) * stride_, clusters_ - 1, edges_.data() + r * stride_);
    std::copy_n(non_edges_.data() + (r + 1) * stride_, clusters_ - 1, non_edges_.data() + r * stride_);
  }
  --clusters_;
}

bool BlockCounts::operator==(const BlockCounts& other) const {
  if (clusters_ != other.clusters_) return false;
  for (std::size_t h = 0; h < clusters_; ++h) {
    for (std::size_t k = 0; k < clusters_; ++k) {
      if (edges(h, k) != other.edges(h, k) || non_edges(h, k) != other.non_edges(h, k)) return false;
    }
  }
  return true;
}

BlockCounts block_counts(const Network& net, const Partition& part) {
  if (net.size() != part.size()) {
    throw ValidationError("partition covers " + std::to_string(part.size()) + " nodes, network has " +
                          std::to_string(net.size()));
  }
  const std::size_t clusters = part.clusters();
  BlockCounts counts(clusters, clusters);
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto h = static_cast<std::size_t>(part[v]);
    for (std::size_t u = v + 1; u < net.size(); ++u) {
      const auto k = static_cast<std::size_t>(part[u]);
      if (net.edge(v, u)) {
        counts.add(h, k, 1, 0);
      } else {
        counts.add(h, k, 0, 1);
      }
    }
  }
  return counts;
}

BlockState::BlockState(const Network& net, const Partition& part, const AttributeTable* attributes)
    : net_(&net),
      attributes_(attributes),
      labels_(part.labels().begin(), part.labels().end()),
      sizes_(part.sizes().begin(), part.sizes().end()),
      counts_(block_counts(net, part)) {
  if (attributes_ != nullptr) {
    if (attributes_->size() != net.size()) {
      throw ValidationError("attribute table covers " + std::to_string(attributes_->size()) +
                            " nodes, network has " + std::to_string(net.size()));
    }
    const std::size_t c = attributes_->categories();
    categories_.assign(sizes_.size() * c, 0);
    for (std::size_t v = 0; v < labels_.size(); ++v) {
      ++categories_[static_cast<std::size_t>(labels_[v]) * c + static_cast<std::size_t>((*attributes_)[v])];
    }
  }
  scratch_.resize(net.size() + 1);
}

std::span<const std::size_t> BlockState::category_counts(std::size_t h) const {
  if (attributes_ == nullptr) return {};
  const std::size_t c = attributes_->categories();
  return {categories_.data() + h * c, c};
}

void BlockState::tally(std::size_t v, std::span<long> out) const {
  std::fill_n(out.begin(), sizes_.size(), 0L);
  for (auto u : net_->neighbors(v)) {
    const int k = labels_[u];
    if (k >= 0) ++out[static_cast<std::size_t>(k)];
  }
}

void BlockState::remove_node(std::size_t v) {
  const int label = labels_[v];
  const auto h = static_cast<std::size_t>(label);
  labels_[v] = kDetached;
  --sizes_[h];
  std::span<long> r(scratch_.data(), sizes_.size());
  tally(v, r);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    counts_.add(h, k, -r[k], -(static_cast<long>(sizes_[k]) - r[k]));
  }
  if (attributes_ != nullptr) {
    --categories_[h * attributes_->categories() + static_cast<std::size_t>((*attributes_)[v])];
  }
  if (sizes_[h] == 0) {
    counts_.erase_cluster(h);
    sizes_.erase(sizes_.begin() + static_cast<std::ptrdiff_t>(h));
    if (attributes_ != nullptr) {
      const std::size_t c = attributes_->categories();
      categories_.erase(categories_.begin() + static_cast<std::ptrdiff_t>(h * c),
                        categories_.begin() + static_cast<std::ptrdiff_t>((h + 1) * c));
    }
    for (auto& l : labels_) {
      if (l > label) --l;
    }
  }
}

void BlockState::insert_node(std::size_t v, std::size_t h) {
  if (h == sizes_.size()) {
    counts_.append_cluster();
    sizes_.push_back(0);
    if (attributes_ != nullptr) categories_.resize(categories_.size() + attributes_->categories(), 0);
  }
  std::span<long> r(scratch_.data(), sizes_.size());
  tally(v, r);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    counts_.add(h, k, r[k], static_cast<long>(sizes_[k]) - r[k]);
  }
  ++sizes_[h];
  labels_[v] = static_cast<int>(h);
  if (attributes_ != nullptr) {
    ++categories_[h * attributes_->categories() + static_cast<std::size_t>((*attributes_)[v])];
  }
}

Partition BlockState::partition() const { return Partition::from_labels(labels_); }

bool BlockState::consistent() const {
  const Partition part = partition();
  // labels_ may not be in canonical order; compare through the canonical map.
  std::vector<std::size_t> to_canonical(sizes_.size());
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    to_canonical[static_cast<std::size_t>(labels_[v])] = static_cast<std::size_t>(part[v]);
  }
  const BlockCounts fresh = block_counts(*net_, part);
  for (std::size_t h = 0; h < sizes_.size(); ++h) {
    if (sizes_[h] != part.sizes()[to_canonical[h]]) return false;
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
      const long pairs = h == k ? static_cast<long>(sizes_[h] * (sizes_[h] - 1) / 2)
                                : static_cast<long>(sizes_[h] * sizes_[k]);
      if (counts_.edges(h, k) + counts_.non_edges(h, k) != pairs) return false;
      if (counts_.edges(h, k) != fresh.edges(to_canonical[h], to_canonical[k])) return false;
      if (counts_.non_edges(h, k) != fresh.non_edges(to_canonical[h], to_canonical[k])) return false;
    }
  }
  return true;
}

}  // namespace esbm
