#include "esbm/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "esbm/error.hpp"

namespace esbm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + ": " + path.string());
  return in;
}

std::string at_line(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

std::size_t parse_node_id(std::string_view token, std::size_t lineno, std::optional<std::size_t> nodes) {
  const long id = parse_long(trim(token), "node id");
  if (id < 1) throw ValidationError(at_line(lineno) + "node ids are 1-based, got " + std::string(trim(token)));
  if (nodes && static_cast<std::size_t>(id) > *nodes) {
    throw ValidationError(at_line(lineno) + "node " + std::to_string(id) + " exceeds V=" + std::to_string(*nodes));
  }
  return static_cast<std::size_t>(id);
}

}  // namespace

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

long parse_long(std::string_view text, std::string_view what) {
  text = trim(text);
  long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

std::string format_number(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

Network parse_edge_list(std::istream& in, std::optional<std::size_t> nodes) {
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ValidationError(at_line(lineno) + "expected two node ids, got '" + std::string(trim(line)) + "'");
    }
    const std::size_t u = parse_node_id(a, lineno, nodes);
    const std::size_t v = parse_node_id(b, lineno, nodes);
    if (u == v) throw ValidationError(at_line(lineno) + "self-loop at node " + std::to_string(u) + " is not allowed");
    max_id = std::max({max_id, u, v});
    edges.emplace_back(u - 1, v - 1);
  }
  if (in.bad()) throw IoError("error while reading edge list");
  const std::size_t total = nodes.value_or(max_id);
  if (total == 0) throw ValidationError("edge list is empty; pass the node count explicitly");
  if (!nodes) {
    std::vector<char> seen(total, 0);
    for (const auto& [u, v] : edges) seen[u] = seen[v] = 1;
    const auto gap = std::find(seen.begin(), seen.end(), 0);
    if (gap != seen.end()) {
      throw ValidationError("node ids are not contiguous: node " + std::to_string(gap - seen.begin() + 1) +
                            " has no edges; pass the node count explicitly to keep isolated nodes");
    }
  }
  return Network(total, edges);
}

Network read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> nodes) {
  auto in = open_input(path, "edge list");
  try {
    return parse_edge_list(in, nodes);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_edge_list(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open edge list for writing: " + path.string());
  for (const auto& [v, u] : net.edges()) out << v + 1 << ' ' << u + 1 << '\n';
  if (!out) throw IoError("failed writing edge list: " + path.string());
}

AttributeFile parse_attributes(std::istream& in, std::size_t nodes) {
  std::vector<int> values(nodes, -1);
  std::unordered_map<std::string, int> index;
  AttributeFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(at_line(lineno) + "expected 'node_id,category_label'");
    }
    const std::size_t id = parse_node_id(std::string_view(line).substr(0, comma), lineno, nodes);
    const std::string label(trim(std::string_view(line).substr(comma + 1)));
    if (label.empty()) throw ValidationError(at_line(lineno) + "missing category for node " + std::to_string(id));
    if (values[id - 1] >= 0) throw ValidationError(at_line(lineno) + "duplicate attribute for node " + std::to_string(id));
    auto [it, inserted] = index.try_emplace(label, static_cast<int>(out.category_names.size()));
    if (inserted) out.category_names.push_back(label);
    values[id - 1] = it->second;
  }
  if (in.bad()) throw IoError("error while reading attributes");
  for (std::size_t v = 0; v < nodes; ++v) {
    if (values[v] < 0) throw ValidationError("attribute missing for node " + std::to_string(v + 1));
  }
  const std::size_t categories = out.category_names.size();
  out.table = AttributeTable(std::move(values), categories);
  return out;
}

AttributeFile read_attributes(const std::filesystem::path& path, std::size_t nodes) {
  auto in = open_input(path, "attribute file");
  try {
    return parse_attributes(in, nodes);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_partition(const std::filesystem::path& path, const Partition& part) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open partition file for writing: " + path.string());
  for (std::size_t v = 0; v < part.size(); ++v) out << v + 1 << ',' << part[v] + 1 << '\n';
  if (!out) throw IoError("failed writing partition file: " + path.string());
}

Partition read_partition(const std::filesystem::path& path, std::size_t nodes) {
  const AttributeFile file = read_attributes(path, nodes);
  return Partition::from_labels(file.table.values());
}

NewNodeEdges parse_new_edges(std::istream& in, std::size_t nodes) {
  NewNodeEdges out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError(at_line(lineno) + "expected 'new_id,existing_id'");
    const std::string id(trim(std::string_view(line).substr(0, comma)));
    if (id.empty()) throw ValidationError(at_line(lineno) + "empty new node id");
    const std::size_t existing = parse_node_id(std::string_view(line).substr(comma + 1), lineno, nodes);
    auto [it, inserted] = index.try_emplace(id, out.ids.size());
    if (inserted) {
      out.ids.push_back(id);
      out.edges.emplace_back(nodes, 0);
    }
    out.edges[it->second][existing - 1] = 1;
  }
  if (in.bad()) throw IoError("error while reading new-node edges");
  return out;
}

NewNodeEdges read_new_edges(const std::filesystem::path& path, std::size_t nodes) {
  auto in = open_input(path, "new-edges file");
  try {
    return parse_new_edges(in, nodes);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace esbm
