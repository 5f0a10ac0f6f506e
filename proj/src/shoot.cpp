// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/shoot.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace chpattern {

const char* to_string(Symmetry s) {
  switch (s) {
    case Symmetry::Even: return "even";
    case Symmetry::Odd: return "odd";
    case Symmetry::Forward: return "forward";
  }
  return "unknown";
}

Symmetry symmetry_from_string(const std::string& s) {
  if (s == "even") return Symmetry::Even;
  if (s == "odd") return Symmetry::Odd;
  if (s == "forward") return Symmetry::Forward;
  throw DomainError("unknown symmetry '" + s + "' (expected even|odd|forward)");
}

const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::NotConverged: return "not_converged";
    case NewtonStatus::SingularJacobian: return "singular_jacobian";
    case NewtonStatus::NonFiniteSeed: return "non_finite_seed";
  }
  return "unknown";
}

double inner_radius(const ProblemParams& params) {
  return params.dim == 1 ? 0.0 : kRadialInnerRadius;
}

double Profile::sup_norm() const {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

ResidualPair ResidualPair::non_finite() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan};
}

namespace {

void check_backward_request(const ProblemParams& params, Symmetry sym, double radius) {
  params.validate();
  if (sym == Symmetry::Forward) throw DomainError("backward shooting needs Even or Odd symmetry");
  if (sym == Symmetry::Odd && params.dim != 1)
    throw DomainError("odd profiles are only defined for N = 1");
  if (!(radius > inner_radius(params))) throw DomainError("far-field radius must exceed the inner endpoint");
}

IntegratorConfig scaled_config(const IntegratorConfig& cfg, const StateVec& y) {
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  IntegratorConfig out = cfg;
  out.abs_tol = cfg.abs_tol * std::max(scale, std::numeric_limits<double>::min());
  return out;
}

ResidualPair residuals_of(Symmetry sym, const StateVec& y) {
  return sym == Symmetry::Even ? ResidualPair{y[1], y[3]} : ResidualPair{y[0], y[2]};
}

std::vector<double> uniform_nodes(double lo, double hi, double h) {
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round((hi - lo) / h)));
  std::vector<double> nodes(m + 1);
  for (std::size_t i = 0; i <= m; ++i) nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m);
  nodes.back() = hi;
  return nodes;
}

Profile profile_from(const ProblemParams& params, Symmetry sym, const Trajectory& traj, bool reverse) {
  Profile prof;
  prof.params = params;
  prof.symmetry = sym;
  prof.status = traj.status;
  const std::size_t n = traj.output_grid.size();
  prof.grid.resize(n);
  prof.u.resize(n);
  prof.u1.resize(n);
  prof.u2.resize(n);
  prof.u3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = reverse ? n - 1 - i : i;
    prof.grid[i] = traj.output_grid[j];
    prof.u[i] = traj.states[j][0];
    prof.u1[i] = traj.states[j][1];
    prof.u2[i] = traj.states[j][2];
    prof.u3[i] = traj.states[j][3];
  }
  prof.ode_residual_max = ode_residual(prof);
  return prof;
}

}  // namespace

namespace {

// 7-point first-derivative weights (unit spacing) at node m of the stencil 0..6.
using Stencil = std::array<double, 7>;
Stencil derivative_weights(int m) {
  Stencil w{};
  for (int j = 0; j < 7; ++j) {
    if (j == m) {
      for (int l = 0; l < 7; ++l)
        if (l != m) w[j] += 1.0 / (m - l);
      continue;
    }
    double num = 1.0, den = 1.0;
    for (int l = 0; l < 7; ++l) {
      if (l == j) continue;
      den *= j - l;
      if (l != m) num *= m - l;
    }
    w[j] = num / den;
  }
  return w;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::vector<double> ode_residual_series(const Profile& profile) {
  const std::size_t n = profile.size();
  std::vector<double> out(n, 0.0);
  if (n < 7) return out;
  static const std::array<Stencil, 7> weights = [] {
    std::array<Stencil, 7> w;
    for (int m = 0; m < 7; ++m) w[m] = derivative_weights(m);
    return w;
  }();
  // |u|^{p-1}u is analytic only for odd integer p; otherwise u'''' is not
  // smooth across zeros of u (for p = 2 it jumps by 4u'^2), so the stencil is
  // shifted to stay on one side of the crossing.
  const double p = profile.params.p;
  const bool smooth = p == std::floor(p) && std::fmod(p, 2.0) == 1.0;
  const double h = (profile.grid.back() - profile.grid.front()) / static_cast<double>(n - 1);
  const auto& u = profile.u;
  const auto& v = profile.u3;
  for (std::size_t i = 3; i + 3 < n; ++i) {
    std::size_t b = i - 3;
    if (!smooth && sign_of(u[i]) != 0) {
      const auto same_side = [&](std::size_t lo) {
        for (std::size_t k = lo; k < lo + 7; ++k)
          if (sign_of(u[k]) != sign_of(u[i])) return false;
        return true;
      };
      if (!same_side(b)) {
        for (std::size_t shift = 1; shift <= 3; ++shift) {
          if (b + shift + 7 <= n && same_side(b + shift)) {
            b += shift;
            break;
          }
          if (b >= shift && same_side(b - shift)) {
            b -= shift;
            break;
          }
        }
      }
    }
    const Stencil& w = weights[i - b];
    double u4_fd = 0.0;
    for (int j = 0; j < 7; ++j) u4_fd += w[j] * v[b + j];
    u4_fd /= h;
    const StateVec d = eval_rhs_unchecked(profile.params, profile.grid[i], profile.state(i));
    out[i] = std::abs(u4_fd - d[3]);
  }
  return out;
}

double ode_residual(const Profile& profile) {
  double worst = 0.0;
  for (double x : ode_residual_series(profile)) worst = std::max(worst, x);
  return worst;
}

double tail_decay_rate(const Profile& profile) {
  const std::size_t n = profile.size();
  if (n < 6) throw DomainError("profile too short for a tail fit");
  const std::size_t start = n - n / 3;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = start; i < n; ++i) {
    const double u = profile.u[i];
    const double w = u + kSqrt2 * profile.u1[i];
    const double env2 = u * u + w * w;
    if (!(env2 > 0.0)) continue;
    const double x = profile.grid[i];
    const double y = 0.5 * std::log(env2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw DomainError("tail is identically zero");
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

ResidualPair shooting_map(const ProblemParams& params, Symmetry sym, const FarFieldParams& ff,
                          double radius, const IntegratorConfig& cfg) {
  check_backward_request(params, sym, radius);
  const ShootState start = farfield_state(params, ff, radius);
  const double inner = inner_radius(params);
  const std::array<double, 1> out{inner};
  auto rhs = [&params](double r, const StateVec& y) { return eval_rhs_unchecked(params, r, y); };
  const Trajectory traj = integrate(rhs, start.y, radius, inner, out, scaled_config(cfg, start.y));
  if (!traj.completed()) return ResidualPair::non_finite();
  return residuals_of(sym, traj.states.front());
}

Profile integrate_backward_profile(const ProblemParams& params, Symmetry sym, const FarFieldParams& ff,
                                   double radius, double h_out, const IntegratorConfig& cfg) {
  check_backward_request(params, sym, radius);
  if (!(h_out > 0.0)) throw DomainError("output spacing must be > 0");
  const ShootState start = farfield_state(params, ff, radius);
  const double inner = inner_radius(params);
  std::vector<double> nodes = uniform_nodes(inner, radius, h_out);
  std::reverse(nodes.begin(), nodes.end());
  auto rhs = [&params](double r, const StateVec& y) { return eval_rhs_unchecked(params, r, y); };
  const Trajectory traj = integrate(rhs, start.y, radius, inner, nodes, scaled_config(cfg, start.y));
  Profile prof = profile_from(params, sym, traj, /*reverse=*/true);
  prof.source = ff;
  return prof;
}

NewtonResult newton2d(const ResidualMap& map, const FarFieldParams& seed, const NewtonOptions& opts) {
  NewtonResult res;
  res.root = seed;
  res.residual = map(seed);
  if (!res.residual.finite()) {
    res.status = NewtonStatus::NonFiniteSeed;
    return res;
  }
  auto norm2 = [](const ResidualPair& r) { return std::hypot(r.first, r.second); };

  FarFieldParams x = seed;
  ResidualPair fx = res.residual;
  for (int it = 0;; ++it) {
    res.root = x;
    res.residual = fx;
    res.iters = it;
    if (fx.inf_norm() <= opts.tol) {
      res.status = NewtonStatus::Converged;
      return res;
    }
    if (it >= opts.max_iters) {
      res.status = NewtonStatus::NotConverged;
      return res;
    }

    // forward-difference Jacobian, columns d/dk1 and d/dk2
    double jac[2][2];
    for (int j = 0; j < 2; ++j) {
      const double xj = j == 0 ? x.k1 : x.k2;
      double step = opts.fd_step * std::max(1.0, std::abs(xj));
      FarFieldParams xp = x;
      (j == 0 ? xp.k1 : xp.k2) = xj + step;
      ResidualPair fp = map(xp);
      if (!fp.finite()) {
        step = -step;
        (j == 0 ? xp.k1 : xp.k2) = xj + step;
        fp = map(xp);
        if (!fp.finite()) {
          res.status = NewtonStatus::NotConverged;
          return res;
        }
      }
      jac[0][j] = (fp.first - fx.first) / step;
      jac[1][j] = (fp.second - fx.second) / step;
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    const double jnorm2 =
        jac[0][0] * jac[0][0] + jac[0][1] * jac[0][1] + jac[1][0] * jac[1][0] + jac[1][1] * jac[1][1];
    if (!std::isfinite(det) || std::abs(det) < 1e-14 * jnorm2) {
      res.status = NewtonStatus::SingularJacobian;
      return res;
    }
    const double dk1 = -(jac[1][1] * fx.first - jac[0][1] * fx.second) / det;
    const double dk2 = -(-jac[1][0] * fx.first + jac[0][0] * fx.second) / det;

    // damping: halve until the residual norm decreases
    const double f0 = norm2(fx);
    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving) {
      const FarFieldParams trial{x.k1 + lambda * dk1, x.k2 + lambda * dk2};
      const ResidualPair ft = map(trial);
      if (ft.finite() && norm2(ft) < f0) {
        x = trial;
        fx = ft;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      res.status = NewtonStatus::NotConverged;
      res.iters = it + 1;
      return res;
    }
  }
}

ShootResult solve_profile(const ProblemParams& params, Symmetry sym, const FarFieldParams& seed,
                          const ShootSettings& settings) {
  check_backward_request(params, sym, settings.radius);
  ResidualMap map = [&](const FarFieldParams& ff) {
    return shooting_map(params, sym, ff, settings.radius, settings.integrator);
  };
  const NewtonResult nr = newton2d(map, seed, settings.newton);
  ShootResult out;
  out.ff = nr.root;
  out.residual = nr.residual;
  out.origin_defect = nr.residual.sum_squares();
  out.newton_iters = nr.iters;
  out.status = nr.status;
  out.converged = nr.converged();
  if (out.converged) {
    out.profile = integrate_backward_profile(params, sym, nr.root, settings.radius, settings.h_out,
                                             settings.integrator);
  } else {
    out.profile.params = params;
    out.profile.symmetry = sym;
    out.profile.source = nr.root;
  }
  return out;
}

std::vector<FarFieldParams> scan_seeds(const ScanRequest& req) {
  const auto [n1, n2] = req.counts;
  if (n1 < 1 || n2 < 1) throw DomainError("scan counts must be >= 1");
  const auto [lo1, hi1] = req.k1_range;
  const auto [lo2, hi2] = req.k2_range;
  if (n1 > 1 && !(lo1 > 0.0 && hi1 > lo1)) throw DomainError("k1 range must satisfy 0 < lo < hi");
  if (!(hi2 >= lo2)) throw DomainError("k2 range must be ordered");
  std::vector<FarFieldParams> seeds;
  seeds.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
  for (int i = 0; i < n1; ++i) {
    const double k1 = n1 == 1 ? lo1
                              : std::exp(std::log(lo1) + (std::log(hi1) - std::log(lo1)) * i / (n1 - 1));
    for (int j = 0; j < n2; ++j) seeds.push_back({k1, lo2 + (hi2 - lo2) * j / n2});
  }
  return seeds;
}

std::vector<ShootResult> scan(const ProblemParams& params, Symmetry sym, const ScanRequest& req,
                              const ShootSettings& settings) {
  check_backward_request(params, sym, settings.radius);
  const std::vector<FarFieldParams> seeds = scan_seeds(req);
  std::vector<std::optional<ShootResult>> slots(seeds.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      ShootResult r = solve_profile(params, sym, seeds[i], settings);
      if (r.converged && r.profile.status == TrajectoryStatus::Completed &&
          r.profile.sup_norm() > req.zero_threshold)
        slots[i] = std::move(r);
    }
  };
  const int threads = std::max(1, std::min<int>(req.threads, static_cast<int>(seeds.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<ShootResult> found;
  for (auto& s : slots)
    if (s) found.push_back(std::move(*s));
  std::vector<ShootResult> unique = dedupe(found);
  std::stable_sort(unique.begin(), unique.end(), [](const ShootResult& a, const ShootResult& b) {
    return a.profile.sup_norm() < b.profile.sup_norm();
  });
  return unique;
}

double profile_distance(const Profile& a, const Profile& b) {
  if (a.size() != b.size() || a.size() == 0) return std::numeric_limits<double>::infinity();
  double na = 0, nb = 0, dm = 0, dp = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a.u[i] * a.u[i];
    nb += b.u[i] * b.u[i];
    dm += (a.u[i] - b.u[i]) * (a.u[i] - b.u[i]);
    dp += (a.u[i] + b.u[i]) * (a.u[i] + b.u[i]);
  }
  const double scale = std::sqrt(std::max(na, nb));
  if (scale == 0.0) return 0.0;
  return std::sqrt(std::min(dm, dp)) / scale;
}

namespace {

// Same profile up to sign: (k1, k2) ~ (-k1, k2 + π√2) ~ (k1, k2 + 2π√2), and
// (k1, k2 + π√2) is the negated profile.
bool farfield_equivalent(const FarFieldParams& a, const FarFieldParams& b) {
  const FarFieldParams ca = canonical_farfield(a), cb = canonical_farfield(b);
  if (std::abs(ca.k1 - cb.k1) > 1e-8 * std::max(1.0, ca.k1)) return false;
  const double half = 0.5 * kPhasePeriod;
  double d = std::fmod(std::abs(ca.k2 - cb.k2), half);
  d = std::min(d, half - d);
  return d <= 1e-8 * half;
}

}  // namespace

std::vector<ShootResult> dedupe(const std::vector<ShootResult>& results) {
  std::vector<ShootResult> kept;
  for (const ShootResult& r : results) {
    bool merged = false;
    for (ShootResult& k : kept) {
      if (farfield_equivalent(r.ff, k.ff) || profile_distance(r.profile, k.profile) < kDedupeL2Tol) {
        if (r.origin_defect < k.origin_defect) k = r;
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(r);
  }
  return kept;
}

Profile forward_profile(const ProblemParams& params, double a, double span, const IntegratorConfig& cfg,
                        double h_out) {
  params.validate();
  if (params.dim != 1) throw DomainError("forward shooting from the origin is defined for N = 1");
  if (!(span > 0.0)) throw DomainError("forward span must be > 0");
  if (!(h_out > 0.0)) throw DomainError("output spacing must be > 0");
  const std::vector<double> nodes = uniform_nodes(0.0, span, h_out);
  auto rhs = [&params](double r, const StateVec& y) { return eval_rhs_unchecked(params, r, y); };
  const Trajectory traj = integrate(rhs, StateVec{a, 0.0, 0.0, 0.0}, 0.0, span, nodes, cfg);
  Profile prof = profile_from(params, Symmetry::Forward, traj, /*reverse=*/false);
  prof.source = a;
  return prof;
}

StateVec sample_profile(const Profile& profile, double x) {
  const std::size_t n = profile.size();
  if (n < 2) throw DomainError("profile has fewer than two nodes");
  // parity factors for (u, u', u'', u''') under x -> -x
  StateVec parity{1.0, 1.0, 1.0, 1.0};
  if (x < profile.grid.front()) {
    if (profile.params.dim != 1 || profile.grid.front() != 0.0) return {0, 0, 0, 0};
    x = -x;
    parity = profile.symmetry == Symmetry::Odd ? StateVec{-1.0, 1.0, -1.0, 1.0}
                                                : StateVec{1.0, -1.0, 1.0, -1.0};
  }
  if (x > profile.grid.back()) return {0, 0, 0, 0};

  const double lo = profile.grid.front();
  const double h = (profile.grid.back() - lo) / static_cast<double>(n - 1);
  auto i = static_cast<std::size_t>(std::floor((x - lo) / h));
  if (i >= n - 1) i = n - 2;
  const double x0 = profile.grid[i], x1 = profile.grid[i + 1];
  const double dx = x1 - x0;
  const double t = (x - x0) / dx;

  const StateVec s0 = profile.state(i), s1 = profile.state(i + 1);
  const StateVec d0 = eval_rhs_unchecked(profile.params, x0, s0);
  const StateVec d1 = eval_rhs_unchecked(profile.params, x1, s1);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  StateVec out;
  for (int k = 0; k < 4; ++k)
    out[k] = h00 * s0[k] + h10 * dx * d0[k] + h01 * s1[k] + h11 * dx * d1[k];
  for (int k = 0; k < 4; ++k) out[k] *= parity[k];
  return out;
}

}  // namespace chpattern
