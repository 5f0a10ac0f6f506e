// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "chpattern/config.hpp"

namespace chpattern {

inline constexpr const char* kToolVersion = "0.1.0";

/// Run document written as `manifest.json` in the output directory.
struct RunManifest {
  RunConfig config;
  double wall_time_s = 0.0;
  nlohmann::json results = nlohmann::json::array();
  std::vector<std::string> files;  // relative to the output directory
  int exit_code = 0;

  /// Hashes every listed file; throws IoError if one is missing.
  nlohmann::json to_json(const std::filesystem::path& out_dir) const;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir);

/// Problems found (missing files, hash mismatches); empty when consistent.
std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir);

/// Copy of a manifest without the fields that legitimately vary between
/// identical runs (wall time).
nlohmann::json stable_view(nlohmann::json manifest);

}  // namespace chpattern
