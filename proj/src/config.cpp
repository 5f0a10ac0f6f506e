// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace chpattern {

using nlohmann::json;

ConfigError::ConfigError(const std::string& field, int line, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : "field '" + field + "': ") + what),
      field_(field),
      line_(line) {}

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Best effort: walk the dotted path through the source, one quoted key at a time.
int locate_field(std::string_view text, const std::string& path) {
  if (text.empty() || path.empty()) return 0;
  std::size_t pos = 0, start = 0;
  while (start <= path.size()) {
    std::size_t dot = path.find('.', start);
    if (dot == std::string::npos) dot = path.size();
    const std::string key = "\"" + path.substr(start, dot - start) + "\"";
    const std::size_t hit = text.find(key, pos);
    if (hit == std::string_view::npos) return 0;
    pos = hit;
    start = dot + 1;
  }
  return line_of_offset(text, pos);
}

class Reader {
 public:
  Reader(const json& j, std::string path, std::string_view src) : j_(j), path_(std::move(path)), src_(src) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string field = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    throw ConfigError(field, locate_field(src_, field), what);
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
        fail(it.key(), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader child(const char* key) const {
    return Reader(j_.at(key), path_.empty() ? key : path_ + "." + key, src_);
  }

  void get(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    out = v.get<double>();
  }

  void get(const char* key, int& out) const {
    long tmp = out;
    get(key, tmp);
    if (tmp < std::numeric_limits<int>::min() || tmp > std::numeric_limits<int>::max())
      fail(key, "integer out of range");
    out = static_cast<int>(tmp);
  }

  void get(const char* key, long& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    out = v.get<long>();
  }

  void get(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long>() < 0) fail(key, "expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void get(const char* key, std::string& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    out = v.get<std::string>();
  }

  void get(const char* key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> tmp;
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "expected an array of numbers");
      tmp.push_back(x.get<double>());
    }
    out = std::move(tmp);
  }

  void get(const char* key, std::vector<std::string>& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> tmp;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected an array of strings");
      tmp.push_back(x.get<std::string>());
    }
    out = std::move(tmp);
  }

  void get(const char* key, std::array<double, 2>& out) const {
    std::vector<double> tmp;
    get(key, tmp);
    if (!has(key)) return;
    if (tmp.size() != 2) fail(key, "expected two numbers");
    out = {tmp[0], tmp[1]};
  }

  void get(const char* key, std::array<int, 2>& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      fail(key, "expected two integers");
    out = {v[0].get<int>(), v[1].get<int>()};
  }

  template <class F>
  void check(const char* key, F&& f) const {
    try {
      f();
    } catch (const DomainError& e) {
      fail(key, e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::string_view src_;
};

}  // namespace

json config_to_json(const RunConfig& c) {
  const auto& ic = c.shoot.integrator;
  const auto& no = c.shoot.newton;
  return json{
      {"command", c.command},
      {"params", {{"dim", c.params.dim}, {"p", c.params.p}}},
      {"symmetry", to_string(c.symmetry)},
      {"seed", {{"k1", c.seed.k1}, {"k2", c.seed.k2}}},
      {"shoot",
       {{"radius", c.shoot.radius},
        {"h_out", c.shoot.h_out},
        {"integrator",
         {{"rel_tol", ic.rel_tol},
          {"abs_tol", ic.abs_tol},
          {"max_steps", ic.max_steps},
          {"h_init", ic.h_init},
          {"h_min", ic.h_min},
          {"blowup_threshold", ic.blowup_threshold}}},
        {"newton",
         {{"tol", no.tol}, {"max_iters", no.max_iters}, {"fd_step", no.fd_step}, {"max_halvings", no.max_halvings}}}}},
      {"scan",
       {{"k1_range", c.scan.k1_range},
        {"k2_range", c.scan.k2_range},
        {"counts", c.scan.counts},
        {"zero_threshold", c.scan.zero_threshold},
        {"threads", c.scan.threads}}},
      {"forward", {{"a_values", c.forward.a_values}, {"span", c.forward.span}, {"h_out", c.forward.h_out}}},
      {"grid", {{"L", c.grid.L}, {"h", c.grid.h}, {"dim", c.grid.dim}, {"r_min", c.grid.r_min}}},
      {"spectrum", {{"k", c.spectrum.k}, {"weight_profile", c.spectrum.weight_profile}}},
      {"check",
       {{"profiles", c.check.profiles},
        {"shifts", c.check.shifts},
        {"lemma_samples", c.check.lemma_samples},
        {"eps", c.check.eps}}},
      {"export", {{"profiles", c.export_.profiles}}},
      {"out_dir", c.out_dir},
  };
}

RunConfig config_from_json(const json& j, std::string_view src) {
  RunConfig c;
  const Reader root(j, "", src);
  root.allow({"command", "params", "symmetry", "seed", "shoot", "scan", "forward", "grid", "spectrum", "check",
              "export", "out_dir"});

  root.get("command", c.command);
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands))
    root.fail("command", "unknown command '" + c.command + "'");
  root.get("out_dir", c.out_dir);

  if (root.has("params")) {
    const Reader r = root.child("params");
    r.allow({"dim", "p"});
    r.get("dim", c.params.dim);
    r.get("p", c.params.p);
    r.check("p", [&] { c.params.validate(); });
  }
  if (root.has("symmetry")) {
    std::string s;
    root.get("symmetry", s);
    root.check("symmetry", [&] { c.symmetry = symmetry_from_string(s); });
  }
  if (root.has("seed")) {
    const Reader r = root.child("seed");
    r.allow({"k1", "k2"});
    r.get("k1", c.seed.k1);
    r.get("k2", c.seed.k2);
  }
  if (root.has("shoot")) {
    const Reader r = root.child("shoot");
    r.allow({"radius", "h_out", "integrator", "newton"});
    r.get("radius", c.shoot.radius);
    r.get("h_out", c.shoot.h_out);
    if (!(c.shoot.radius > 0.0)) r.fail("radius", "must be > 0");
    if (!(c.shoot.h_out > 0.0)) r.fail("h_out", "must be > 0");
    if (r.has("integrator")) {
      const Reader ri = r.child("integrator");
      auto& ic = c.shoot.integrator;
      ri.allow({"rel_tol", "abs_tol", "max_steps", "h_init", "h_min", "blowup_threshold"});
      ri.get("rel_tol", ic.rel_tol);
      ri.get("abs_tol", ic.abs_tol);
      ri.get("max_steps", ic.max_steps);
      ri.get("h_init", ic.h_init);
      ri.get("h_min", ic.h_min);
      ri.get("blowup_threshold", ic.blowup_threshold);
      ri.check("rel_tol", [&] { ic.validate(); });
    }
    if (r.has("newton")) {
      const Reader rn = r.child("newton");
      auto& no = c.shoot.newton;
      rn.allow({"tol", "max_iters", "fd_step", "max_halvings"});
      rn.get("tol", no.tol);
      rn.get("max_iters", no.max_iters);
      rn.get("fd_step", no.fd_step);
      rn.get("max_halvings", no.max_halvings);
      if (!(no.tol > 0.0)) rn.fail("tol", "must be > 0");
      if (no.max_iters < 1) rn.fail("max_iters", "must be >= 1");
      if (!(no.fd_step > 0.0)) rn.fail("fd_step", "must be > 0");
      if (no.max_halvings < 0) rn.fail("max_halvings", "must be >= 0");
    }
  }
  if (root.has("scan")) {
    const Reader r = root.child("scan");
    r.allow({"k1_range", "k2_range", "counts", "zero_threshold", "threads"});
    r.get("k1_range", c.scan.k1_range);
    r.get("k2_range", c.scan.k2_range);
    r.get("counts", c.scan.counts);
    r.get("zero_threshold", c.scan.zero_threshold);
    r.get("threads", c.scan.threads);
    if (!(c.scan.k1_range[0] > 0.0 && c.scan.k1_range[1] >= c.scan.k1_range[0]))
      r.fail("k1_range", "need 0 < lo <= hi");
    if (!(c.scan.k2_range[1] >= c.scan.k2_range[0])) r.fail("k2_range", "need lo <= hi");
    if (c.scan.counts[0] < 1 || c.scan.counts[1] < 1) r.fail("counts", "must be >= 1");
    if (c.scan.threads < 0) r.fail("threads", "must be >= 0 (0 = all cores)");
  }
  if (root.has("forward")) {
    const Reader r = root.child("forward");
    r.allow({"a_values", "span", "h_out"});
    r.get("a_values", c.forward.a_values);
    r.get("span", c.forward.span);
    r.get("h_out", c.forward.h_out);
    if (!(c.forward.span > 0.0)) r.fail("span", "must be > 0");
    if (!(c.forward.h_out > 0.0)) r.fail("h_out", "must be > 0");
  }
  if (root.has("grid")) {
    const Reader r = root.child("grid");
    r.allow({"L", "h", "dim", "r_min"});
    r.get("L", c.grid.L);
    r.get("h", c.grid.h);
    r.get("dim", c.grid.dim);
    r.get("r_min", c.grid.r_min);
    r.check("h", [&] { c.grid.validate(); });
  }
  if (root.has("spectrum")) {
    const Reader r = root.child("spectrum");
    r.allow({"k", "weight_profile"});
    r.get("k", c.spectrum.k);
    r.get("weight_profile", c.spectrum.weight_profile);
    if (c.spectrum.k < 1) r.fail("k", "must be >= 1");
  }
  if (root.has("check")) {
    const Reader r = root.child("check");
    r.allow({"profiles", "shifts", "lemma_samples", "eps"});
    r.get("profiles", c.check.profiles);
    r.get("shifts", c.check.shifts);
    r.get("lemma_samples", c.check.lemma_samples);
    r.get("eps", c.check.eps);
    if (c.check.lemma_samples < 2) r.fail("lemma_samples", "must be >= 2");
    if (!(c.check.eps > 0.0)) r.fail("eps", "must be > 0");
  }
  if (root.has("export")) {
    const Reader r = root.child("export");
    r.allow({"profiles"});
    r.get("profiles", c.export_.profiles);
  }
  return c;
}

std::string print_config(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "syntax error");
  }
  return config_from_json(j, text);
}

}  // namespace chpattern
