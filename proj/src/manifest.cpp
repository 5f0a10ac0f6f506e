// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/manifest.hpp"

#include <algorithm>

#include "chpattern/io.hpp"

namespace chpattern {

using nlohmann::json;

json RunManifest::to_json(const std::filesystem::path& out_dir) const {
  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  json inventory = json::array();
  for (const auto& rel : sorted) {
    const std::string data = read_file(out_dir / rel);
    inventory.push_back({{"path", rel}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }
  return json{{"tool", "chpattern"},
              {"version", kToolVersion},
              {"command", config.command},
              {"config", config_to_json(config)},
              {"exit_code", exit_code},
              {"wall_time_s", wall_time_s},
              {"results", results},
              {"files", inventory}};
}

void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
  write_file_atomic(out_dir / "manifest.json", m.to_json(out_dir).dump(2) + "\n");
}

std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir) {
  std::vector<std::string> problems;
  json m;
  try {
    m = json::parse(read_file(out_dir / "manifest.json"));
  } catch (const std::exception& e) {
    return {std::string("unreadable manifest: ") + e.what()};
  }
  for (const auto& f : m.value("files", json::array())) {
    const std::string rel = f.at("path").get<std::string>();
    std::string data;
    try {
      data = read_file(out_dir / rel);
    } catch (const IoError&) {
      problems.push_back("missing " + rel);
      continue;
    }
    if (data.size() != f.at("bytes").get<std::size_t>() || sha256_hex(data) != f.at("sha256").get<std::string>())
      problems.push_back("hash mismatch " + rel);
  }
  return problems;
}

json stable_view(json manifest) {
  manifest.erase("wall_time_s");
  return manifest;
}

}  // namespace chpattern
