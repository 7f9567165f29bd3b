#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "esbm/error.hpp"

namespace esbm::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 unavailable");
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  static constexpr char hex[] = "0123456789abcdef";
  std::string text;
  for (unsigned int i = 0; i < length; ++i) {
    text.push_back(hex[digest[i] >> 4]);
    text.push_back(hex[digest[i] & 15]);
  }
  return text;
}

std::filesystem::path append_manifest(const std::filesystem::path& dir, const RunManifest& run) {
  const auto path = (dir.empty() ? std::filesystem::path(".") : dir) / "manifest.json";
  nlohmann::ordered_json doc = {{"runs", nlohmann::ordered_json::array()}};
  if (std::ifstream existing(path); existing) {
    try {
      doc = nlohmann::ordered_json::parse(existing);
    } catch (const nlohmann::json::exception&) {
      throw IoError("existing manifest is not valid JSON: " + path.string());
    }
    if (!doc.contains("runs") || !doc["runs"].is_array()) doc["runs"] = nlohmann::ordered_json::array();
  }
  nlohmann::ordered_json entry;
  entry["subcommand"] = run.subcommand;
  entry["parameters"] = run.parameters;
  if (run.seed) entry["seed"] = *run.seed;
  entry["inputs"] = nlohmann::ordered_json::array();
  for (const auto& input : run.inputs) {
    entry["inputs"].push_back({{"path", input.string()}, {"sha256", sha256_file(input)}});
  }
  entry["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& artifact : run.artifacts) entry["artifacts"].push_back(artifact.string());
  entry["wall_clock_seconds"] = run.seconds;
  if (run.sweeps_per_second) entry["sweeps_per_second"] = *run.sweeps_per_second;
  if (!run.diagnostics.is_null()) entry["diagnostics"] = run.diagnostics;
  doc["runs"].push_back(std::move(entry));

  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest: " + path.string());
  return path;
}

}  // namespace esbm::cli
