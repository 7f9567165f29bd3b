#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "esbm/network.hpp"

namespace esbm {

/// Edge list: one "u v" pair per line, 1-based, whitespace separated. Blank
/// lines and lines starting with '#' are skipped. Without `nodes`, V is the
/// largest id and every id in 1..V must occur.
Network parse_edge_list(std::istream& in, std::optional<std::size_t> nodes = std::nullopt);
Network read_edge_list(const std::filesystem::path& path,
                       std::optional<std::size_t> nodes = std::nullopt);
void write_edge_list(const std::filesystem::path& path, const Network& net);

struct AttributeFile {
  AttributeTable table;
  std::vector<std::string> category_names;  // index = category
};

/// Header-less "node_id,category_label" CSV covering nodes 1..nodes exactly once.
AttributeFile parse_attributes(std::istream& in, std::size_t nodes);
AttributeFile read_attributes(const std::filesystem::path& path, std::size_t nodes);

/// Header-less "node,cluster" CSV with 1-based values.
void write_partition(const std::filesystem::path& path, const Partition& part);
Partition read_partition(const std::filesystem::path& path, std::size_t nodes);

/// Header-less "new_id,existing_id" rows. Returns one length-V edge row per
/// distinct new id in first-appearance order; ids are kept in `ids`.
struct NewNodeEdges {
  std::vector<std::string> ids;
  std::vector<std::vector<std::uint8_t>> edges;
};
NewNodeEdges parse_new_edges(std::istream& in, std::size_t nodes);
NewNodeEdges read_new_edges(const std::filesystem::path& path, std::size_t nodes);

/// Locale-independent number parsing; throws ValidationError with `what`.
double parse_double(std::string_view text, std::string_view what);
long parse_long(std::string_view text, std::string_view what);

/// Shortest round-trip style formatting with `digits` significant digits.
std::string format_number(double value, int digits = 6);

}  // namespace esbm
