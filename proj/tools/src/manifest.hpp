#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace esbm::cli {

struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> artifacts;
  double seconds = 0.0;
  std::optional<double> sweeps_per_second;
  nlohmann::ordered_json diagnostics;
};

std::string sha256_file(const std::filesystem::path& path);

/// Appends the run to <dir>/manifest.json, creating the file if needed. One
/// manifest per output directory; earlier runs are kept in "runs".
std::filesystem::path append_manifest(const std::filesystem::path& dir, const RunManifest& run);

}  // namespace esbm::cli
