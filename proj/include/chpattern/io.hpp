// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chpattern/shoot.hpp"

namespace chpattern {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, scientific, locale independent.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Writes to `path.tmp` then renames over `path`. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(std::string_view name) const;
};

std::string csv_text(const CsvTable& table);
CsvTable parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Header `r,u,u1,u2,u3`.
CsvTable profile_table(const Profile& profile);
void write_profile_csv(const Profile& profile, const std::filesystem::path& path);
/// Params and symmetry are not stored in the file and must be supplied.
Profile read_profile_csv(const std::filesystem::path& path, const ProblemParams& params, Symmetry sym);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace chpattern
