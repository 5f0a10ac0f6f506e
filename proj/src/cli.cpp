// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "chpattern/io.hpp"
#include "chpattern/manifest.hpp"
#include "chpattern/shoot.hpp"
#include "chpattern/spectral.hpp"
#include "chpattern/varcheck.hpp"

namespace chpattern {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string numbered(const std::string& stem, std::size_t i, const char* ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return stem + "_" + buf + ext;
}

int resolve_threads(int configured) {
  int threads = configured > 0 ? configured : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CHPATTERN_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw ConfigError("CHPATTERN_THREADS", 0, "expected a positive integer");
    threads = std::min<long>(threads, cap);
  }
  return threads;
}

CsvTable residual_table(const Profile& p) {
  const std::vector<double> res = ode_residual_series(p);
  std::vector<double> sym(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    sym[i] = p.symmetry == Symmetry::Odd ? std::max(std::abs(p.u[i]), std::abs(p.u2[i]))
                                         : std::max(std::abs(p.u1[i]), std::abs(p.u3[i]));
  }
  return CsvTable{{"r", "ode_residual", "symmetry_defect"}, {p.grid, res, sym}};
}

json profile_summary(const Profile& p) {
  json j{{"sup_norm", p.sup_norm()},
         {"ode_residual_max", p.ode_residual_max},
         {"integration_status", to_string(p.status)},
         {"nodes", p.size()}};
  try {
    j["decay_rate"] = tail_decay_rate(p);
  } catch (const DomainError&) {
    j["decay_rate"] = nullptr;
  }
  try {
    const FunctionalReport f = functional_F(p);
    j["F"] = f.F;
    j["identity_defect"] = f.identity_defect;
    j["boundary_warning"] = f.boundary_warning;
  } catch (const DomainError&) {
    j["F"] = nullptr;
    j["identity_defect"] = nullptr;
  }
  return j;
}

json shoot_summary(const ShootResult& r) {
  json j = profile_summary(r.profile);
  const FarFieldParams ff = canonical_farfield(r.ff);
  j["k1"] = ff.k1;
  j["k2"] = ff.k2;
  j["origin_defect"] = r.origin_defect;
  j["newton_iters"] = r.newton_iters;
  j["newton_status"] = to_string(r.status);
  j["converged"] = r.converged;
  return j;
}

struct Writer {
  fs::path out;
  RunManifest& manifest;

  std::string csv(const std::string& rel, const CsvTable& t) {
    write_csv(out / rel, t);
    manifest.files.push_back(rel);
    return rel;
  }
};

int run_shoot(const RunConfig& c, Writer& w) {
  if (c.seed.k1 == 0.0) {
    // u = 0 solves the problem for every k2; nothing to integrate
    w.manifest.results.push_back({{"kind", "shoot"},
                                  {"k1", 0.0},
                                  {"k2", c.seed.k2},
                                  {"trivial", true},
                                  {"filtered", true},
                                  {"origin_defect", 0.0}});
    return kExitOk;
  }
  const ShootResult r = solve_profile(c.params, c.symmetry, c.seed, c.shoot);
  json j = shoot_summary(r);
  j["kind"] = "shoot";
  j["trivial"] = r.profile.sup_norm() <= c.scan.zero_threshold;
  j["filtered"] = j["trivial"];
  if (r.converged) {
    j["file"] = w.csv("profiles/shoot.csv", profile_table(r.profile));
    j["residual_file"] = w.csv("diagnostics/shoot_residual.csv", residual_table(r.profile));
  }
  w.manifest.results.push_back(j);
  return r.converged ? kExitOk : kExitOperation;
}

int run_scan(const RunConfig& c, Writer& w) {
  ScanRequest req = c.scan;
  req.threads = resolve_threads(c.scan.threads);
  const std::vector<ShootResult> found = scan(c.params, c.symmetry, req, c.shoot);
  for (std::size_t i = 0; i < found.size(); ++i) {
    json j = shoot_summary(found[i]);
    j["kind"] = "scan";
    j["index"] = i;
    j["file"] = w.csv("profiles/" + numbered("scan", i, ".csv"), profile_table(found[i].profile));
    j["residual_file"] =
        w.csv("diagnostics/" + numbered("scan", i, "_residual.csv"), residual_table(found[i].profile));
    w.manifest.results.push_back(j);
  }
  return kExitOk;
}

int run_forward(const RunConfig& c, Writer& w) {
  std::vector<double> a_col, nodes_col, mean_col, cv_col, ext_cv_col, class_col;
  for (std::size_t i = 0; i < c.forward.a_values.size(); ++i) {
    const double a = c.forward.a_values[i];
    const Profile prof = forward_profile(c.params, a, c.forward.span, c.shoot.integrator, c.forward.h_out);
    const PatternStats st = pattern_stats(prof);
    json j{{"kind", "forward"},
           {"a", a},
           {"integration_status", to_string(prof.status)},
           {"r_reached", prof.grid.empty() ? 0.0 : prof.grid.back()},
           {"n_extrema", st.n_extrema},
           {"n_nodes", st.nodes.count},
           {"spacing_mean", st.spacing_mean},
           {"spacing_cv", st.spacing_cv},
           {"extrema_spacing_cv", st.extrema.cv},
           {"classification", to_string(st.classification)}};
    j["file"] = w.csv("profiles/" + numbered("forward", i, ".csv"), profile_table(prof));
    w.manifest.results.push_back(j);
    a_col.push_back(a);
    nodes_col.push_back(static_cast<double>(st.nodes.count));
    mean_col.push_back(st.spacing_mean);
    cv_col.push_back(st.spacing_cv);
    ext_cv_col.push_back(st.extrema.cv);
    class_col.push_back(static_cast<double>(st.classification));
  }
  w.csv("diagnostics/pattern.csv",
        CsvTable{{"a", "n_nodes", "spacing_mean", "spacing_cv", "extrema_spacing_cv", "class"},
                 {a_col, nodes_col, mean_col, cv_col, ext_cv_col, class_col}});
  return kExitOk;
}

int run_spectrum(const RunConfig& c, Writer& w) {
  if (c.spectrum.weight_profile.empty()) {
    const SpectrumReport rep = spectrum_L(c.grid, c.spectrum.k);
    std::vector<double> idx;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) idx.push_back(static_cast<double>(i));
    const std::string file = w.csv("spectra/spectrum.csv", CsvTable{{"index", "lambda", "d", "identity_defect"},
                                                                    {idx, rep.eigenvalues, rep.d_values,
                                                                     rep.identity_defects}});
    w.manifest.results.push_back({{"kind", "spectrum"},
                                  {"weighted", false},
                                  {"eigenvalues", rep.eigenvalues},
                                  {"lambda1", rep.eigenvalues.front()},
                                  {"file", file}});
    return kExitOk;
  }
  const Profile prof = read_profile_csv(c.spectrum.weight_profile, c.params, c.symmetry);
  const SpectrumReport rep = linearized_spectrum(prof, c.spectrum.k);
  std::vector<double> idx;
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) idx.push_back(static_cast<double>(i));
  const std::string file = w.csv("spectra/weighted.csv", CsvTable{{"index", "lambda", "identity_defect"},
                                                                  {idx, rep.eigenvalues, rep.identity_defects}});
  const double l1 = rep.eigenvalues.front();
  w.manifest.results.push_back({{"kind", "spectrum"},
                                {"weighted", true},
                                {"profile", c.spectrum.weight_profile},
                                {"eigenvalues", rep.eigenvalues},
                                {"lambda1_star", l1},
                                {"exceeds_1", l1 > 1.0},
                                {"exceeds_2", l1 > 2.0},
                                {"file", file}});
  return kExitOk;
}

int run_check(const RunConfig& c, Writer& w) {
  for (const auto& path : c.check.profiles) {
    const Profile prof = read_profile_csv(path, c.params, c.symmetry);
    json j = profile_summary(prof);
    j["kind"] = "check";
    j["profile"] = path;
    if (c.params.dim == 1 && !c.check.shifts.empty()) {
      const std::vector<double> dev = two_hump_check(prof, c.check.shifts);
      j["two_hump"] = json::array();
      for (std::size_t i = 0; i < dev.size(); ++i)
        j["two_hump"].push_back({{"shift", c.check.shifts[i]}, {"relative_deviation", dev[i]}});
    }
    w.manifest.results.push_back(j);
  }
  const InequalityConstants k = sweep_constants(c.params.p, c.check.eps);
  const InequalityReport rep = scalar_inequalities(c.params.p, c.check.lemma_samples, k);
  w.manifest.results.push_back({{"kind", "inequalities"},
                                {"p", c.params.p},
                                {"samples", rep.samples},
                                {"eps", k.eps},
                                {"c_eps", k.c_eps},
                                {"c_binom", k.c_binom},
                                {"max_T_violation", rep.maxT_violation},
                                {"max_H_violation", rep.maxH_violation},
                                {"max_binom_violation", rep.maxBinom_violation}});
  return kExitOk;
}

int run_export(const RunConfig& c, Writer& w) {
  for (std::size_t i = 0; i < c.export_.profiles.size(); ++i) {
    const std::string& path = c.export_.profiles[i];
    const Profile p = read_profile_csv(path, c.params, c.symmetry);
    CsvTable t = profile_table(p);
    if (c.params.dim == 1 && !p.grid.empty() && p.grid.front() == 0.0) {
      // reflect to r < 0 using the profile's parity
      const double s = p.symmetry == Symmetry::Odd ? -1.0 : 1.0;
      const double par[4] = {s, -s, s, -s};
      CsvTable full{t.header, std::vector<std::vector<double>>(5)};
      for (std::size_t k = p.size() - 1; k >= 1; --k) {
        full.columns[0].push_back(-p.grid[k]);
        for (int m = 0; m < 4; ++m) full.columns[m + 1].push_back(par[m] * t.columns[m + 1][k]);
      }
      for (std::size_t k = 0; k < p.size(); ++k)
        for (int m = 0; m < 5; ++m) full.columns[m].push_back(t.columns[m][k]);
      t = std::move(full);
    }
    const std::string stem = fs::path(path).stem().string();
    const std::string file = w.csv("plots/" + numbered(stem, i, ".csv"), t);
    w.manifest.results.push_back({{"kind", "export"}, {"source", path}, {"file", file}});
  }
  return kExitOk;
}

}  // namespace

RunOutcome run_command(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config = config;
  const fs::path out = config.out_dir;
  Writer w{out, manifest};

  int code = kExitOk;
  const std::string& cmd = config.command;
  if (cmd == "shoot")
    code = run_shoot(config, w);
  else if (cmd == "scan")
    code = run_scan(config, w);
  else if (cmd == "forward")
    code = run_forward(config, w);
  else if (cmd == "spectrum")
    code = run_spectrum(config, w);
  else if (cmd == "check")
    code = run_check(config, w);
  else if (cmd == "export")
    code = run_export(config, w);
  else
    throw ConfigError("command", 0, "unknown command '" + cmd + "'");

  manifest.exit_code = code;
  manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(manifest, out);
  return {code, manifest.to_json(out)};
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Localized patterns of -Δ²u - u - Δ(|u|^{p-1}u) = 0: shooting, spectra and checks"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::optional<int> dim;
  std::optional<double> p, k1, k2;
  std::optional<std::string> symmetry, weight_profile;
  std::optional<std::size_t> k;
  std::vector<std::string> profiles;

  const std::map<std::string_view, std::string> help{
      {"shoot", "Newton on the shooting map from one (k1, k2) seed"},
      {"scan", "shoot from a grid of seeds and keep distinct profiles"},
      {"forward", "forward shots from u(0) = a with spacing statistics"},
      {"spectrum", "eigenvalues of -Δ + (-Δ)^{-1}, plain or weighted by a profile"},
      {"check", "functional, two-hump and scalar inequality checks on stored profiles"},
      {"export", "re-emit stored profiles as plot-ready CSV on the full line"}};
  for (std::string_view name : kCommands) {
    CLI::App* sub = app.add_subcommand(std::string(name), help.at(name));
    sub->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--dim", dim, "space dimension N");
    sub->add_option("--p", p, "nonlinearity exponent");
    sub->add_option("--symmetry", symmetry, "even | odd | forward");
    if (name == "shoot") {
      sub->add_option("--k1", k1, "seed amplitude");
      sub->add_option("--k2", k2, "seed phase");
    }
    if (name == "spectrum") {
      sub->add_option("--k", k, "number of eigenvalues");
      sub->add_option("--weight-profile", weight_profile, "profile CSV for the weighted problem");
    }
    if (name == "check" || name == "export") sub->add_option("--profile", profiles, "stored profile CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      cfg = parse_config(text);
      if (cfg.command != command && nlohmann::json::parse(text, nullptr, true, true).contains("command"))
        throw ConfigError("command", 0, "config is for '" + cfg.command + "', not '" + command + "'");
    }
    nlohmann::json j = config_to_json(cfg);
    j["command"] = command;
    if (!out_dir.empty()) j["out_dir"] = out_dir;
    if (dim) j["params"]["dim"] = *dim;
    if (p) j["params"]["p"] = *p;
    if (symmetry) j["symmetry"] = *symmetry;
    if (k1) j["seed"]["k1"] = *k1;
    if (k2) j["seed"]["k2"] = *k2;
    if (k) j["spectrum"]["k"] = *k;
    if (weight_profile) j["spectrum"]["weight_profile"] = *weight_profile;
    if (!profiles.empty()) {
      if (command == "check") j["check"]["profiles"] = profiles;
      if (command == "export") j["export"]["profiles"] = profiles;
    }
    cfg = config_from_json(j);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << (config_path.empty() ? "" : config_path + ": ") << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const RunOutcome outcome = run_command(cfg);
    if (outcome.exit_code != kExitOk) std::cerr << "run finished with errors; see manifest.json\n";
    std::cout << (fs::path(cfg.out_dir) / "manifest.json").string() << "\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperation;
  }
}

}  // namespace chpattern
