// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "chpattern/io.hpp"

namespace chpattern {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, 16);
  if (res.ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError("not a number: '" + std::string(text) + "'");
  return x;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw IoError("missing column '" + std::string(name) + "'");
}

std::string csv_text(const CsvTable& t) {
  if (t.header.size() != t.columns.size()) throw IoError("header and column count differ");
  const std::size_t rows = t.rows();
  for (const auto& c : t.columns)
    if (c.size() != rows) throw IoError("ragged table");
  std::string out;
  out.reserve((rows + 1) * t.header.size() * 25);
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j) out += ',';
    out += t.header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(t.columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    parts.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto parts = split(line);
    if (t.header.empty()) {
      for (auto p : parts) t.header.emplace_back(p);
      t.columns.resize(t.header.size());
      continue;
    }
    if (parts.size() != t.header.size())
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                    " fields");
    for (std::size_t j = 0; j < parts.size(); ++j) {
      try {
        t.columns[j].push_back(parse_double(parts[j]));
      } catch (const IoError& e) {
        throw IoError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (t.header.empty()) throw IoError("empty csv");
  return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_file_atomic(path, csv_text(table));
}

CsvTable read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

CsvTable profile_table(const Profile& p) {
  return CsvTable{{"r", "u", "u1", "u2", "u3"}, {p.grid, p.u, p.u1, p.u2, p.u3}};
}

void write_profile_csv(const Profile& profile, const std::filesystem::path& path) {
  write_csv(path, profile_table(profile));
}

Profile read_profile_csv(const std::filesystem::path& path, const ProblemParams& params, Symmetry sym) {
  const CsvTable t = read_csv(path);
  const std::vector<std::string> expected{"r", "u", "u1", "u2", "u3"};
  if (t.header != expected) throw IoError(path.string() + ": header must be r,u,u1,u2,u3");
  Profile p;
  p.params = params;
  p.symmetry = sym;
  p.grid = t.columns[0];
  p.u = t.columns[1];
  p.u1 = t.columns[2];
  p.u2 = t.columns[3];
  p.u3 = t.columns[4];
  if (p.size() >= 7) p.ode_residual_max = ode_residual(p);
  return p;
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace chpattern
