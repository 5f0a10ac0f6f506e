// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "chpattern/config.hpp"

namespace chpattern {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitOperation = 1, kExitConfig = 2 };

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json manifest;
};

/// Runs one resolved config, writing outputs and manifest.json under
/// config.out_dir. Config problems throw ConfigError; anything else that goes
/// wrong throws or comes back as exit code 1.
RunOutcome run_command(const RunConfig& config);

/// argv front end. Never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace chpattern
