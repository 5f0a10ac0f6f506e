// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chpattern/shoot.hpp"
#include "chpattern/spectral.hpp"

namespace chpattern {

/// Bad config document. `line` is 0 when it cannot be located.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ForwardSettings {
  std::vector<double> a_values{1.0, 2.0, 4.0};
  double span = 200.0;
  double h_out = 0.01;
  bool operator==(const ForwardSettings&) const = default;
};

struct SpectrumSettings {
  std::size_t k = 5;
  /// Profile CSV for the weighted problem; empty means the plain spectrum.
  std::string weight_profile;
  bool operator==(const SpectrumSettings&) const = default;
};

struct CheckSettings {
  std::vector<std::string> profiles;
  std::vector<double> shifts{10.0, 15.0, 20.0};
  std::size_t lemma_samples = 100;
  double eps = 0.1;
  bool operator==(const CheckSettings&) const = default;
};

struct ExportSettings {
  std::vector<std::string> profiles;
  bool operator==(const ExportSettings&) const = default;
};

struct RunConfig {
  std::string command = "shoot";
  ProblemParams params;
  Symmetry symmetry = Symmetry::Even;
  FarFieldParams seed{1.0, 0.0};
  ShootSettings shoot;
  ScanRequest scan = [] {
    ScanRequest s;
    s.threads = 0;  // all cores, capped by CHPATTERN_THREADS
    return s;
  }();
  ForwardSettings forward;
  GridSpec grid;
  SpectrumSettings spectrum;
  CheckSettings check;
  ExportSettings export_;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

inline constexpr std::string_view kCommands[] = {"shoot", "scan", "forward", "spectrum", "check", "export"};

nlohmann::json config_to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j, std::string_view source_text = {});

std::string print_config(const RunConfig& c);
RunConfig parse_config(std::string_view text);

}  // namespace chpattern
