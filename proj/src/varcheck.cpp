// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/varcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chpattern/tridiagonal.hpp"

namespace chpattern {

namespace {

double uniform_spacing(std::span<const double> grid) {
  if (grid.size() < 3) throw DomainError("grid needs at least three nodes");
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) throw DomainError("grid must be increasing");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-6 * h) throw DomainError("grid is not uniform");
  return h;
}

double trapezoid(std::span<const double> f, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i == 0 || i + 1 == f.size() ? 0.5 : 1.0) * f[i];
  return s * h;
}

}  // namespace

PoissonResult poisson_inverse(std::span<const double> grid, std::span<const double> u, int dim) {
  if (grid.size() != u.size()) throw DomainError("grid and samples differ in length");
  if (dim < 1) throw DomainError("dimension must be >= 1");
  const double h = uniform_spacing(grid);
  const std::size_t n = grid.size();

  PoissonResult out;
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, std::abs(x));
  out.boundary_warning = std::max(std::abs(u.front()), std::abs(u.back())) > 1e-6 * umax;
  out.v.assign(n, 0.0);
  if (umax == 0.0) return out;

  // interior nodes 1..n-2; radial case in w = r^{(N-1)/2} v
  const double m = 0.5 * (dim - 1.0);
  const double c = 0.25 * (dim - 1.0) * (dim - 3.0);
  SymTridiagonal lap;
  lap.diag.assign(n - 2, 2.0 / (h * h));
  lap.off.assign(n - 3, -1.0 / (h * h));
  std::vector<double> rhs(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = grid[i];
    if (dim > 1) {
      if (!(r > 0.0)) throw DomainError("radial grid must stay at r > 0 inside");
      lap.diag[i - 1] += c / (r * r);
      rhs[i - 1] = std::pow(r, m) * u[i];
    } else {
      rhs[i - 1] = u[i];
    }
  }
  const std::vector<double> w = lap.solve(rhs);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out.v[i] = dim > 1 ? w[i - 1] * std::pow(grid[i], -m) : w[i - 1];
  return out;
}

FunctionalReport functional_F(const SampledFunction& f, double p) {
  const std::size_t n = f.grid.size();
  if (f.u.size() != n) throw DomainError("samples and grid differ in length");
  const double h = uniform_spacing(f.grid);
  std::vector<double> du = f.du;
  if (du.empty()) {
    du.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) du[i] = (f.u[i + 1] - f.u[i - 1]) / (2.0 * h);
    du[0] = (-3.0 * f.u[0] + 4.0 * f.u[1] - f.u[2]) / (2.0 * h);
    du[n - 1] = (3.0 * f.u[n - 1] - 4.0 * f.u[n - 2] + f.u[n - 3]) / (2.0 * h);
  } else if (du.size() != n) {
    throw DomainError("derivative samples and grid differ in length");
  }

  const PoissonResult pr = poisson_inverse(f.grid, f.u, f.dim);
  std::vector<double> grad2(n), uv(n), pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double meas = f.dim > 1 ? std::pow(f.grid[i], f.dim - 1.0) : 1.0;
    grad2[i] = meas * du[i] * du[i];
    uv[i] = meas * f.u[i] * pr.v[i];
    pot[i] = meas * std::pow(std::abs(f.u[i]), p + 1.0);
  }
  FunctionalReport rep;
  rep.dirichlet = trapezoid(grad2, h);
  rep.nonlocal = trapezoid(uv, h);
  rep.potential = trapezoid(pot, h);
  rep.F = 0.5 * rep.dirichlet + 0.5 * rep.nonlocal - rep.potential / (p + 1.0);
  rep.identity_defect =
      std::abs(rep.dirichlet + rep.nonlocal - rep.potential) / std::max(rep.potential, 1e-30);
  rep.boundary_warning = pr.boundary_warning;
  return rep;
}

SampledFunction to_sampled(const Profile& profile) {
  SampledFunction f;
  f.dim = profile.params.dim;
  const std::size_t n = profile.size();
  if (n < 3) throw DomainError("profile has fewer than three nodes");
  if (f.dim > 1 || profile.grid.front() != 0.0) {
    f.grid = profile.grid;
    f.u = profile.u;
    f.du = profile.u1;
    return f;
  }
  const double su = profile.symmetry == Symmetry::Odd ? -1.0 : 1.0;
  f.grid.reserve(2 * n - 1);
  for (std::size_t i = n - 1; i >= 1; --i) {
    f.grid.push_back(-profile.grid[i]);
    f.u.push_back(su * profile.u[i]);
    f.du.push_back(-su * profile.u1[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    f.grid.push_back(profile.grid[i]);
    f.u.push_back(profile.u[i]);
    f.du.push_back(profile.u1[i]);
  }
  return f;
}

FunctionalReport functional_F(const Profile& profile) {
  return functional_F(to_sampled(profile), profile.params.p);
}

SpectrumReport linearized_spectrum(const Profile& profile, std::size_t k) {
  const SampledFunction f = to_sampled(profile);
  const std::size_t n = f.grid.size();
  GridSpec grid;
  grid.dim = f.dim;
  if (f.dim == 1) {
    grid.L = f.grid.back();
    grid.h = 2.0 * grid.L / static_cast<double>(n - 1);
    if (std::abs(f.grid.front() + grid.L) > 1e-9 * grid.L) throw DomainError("line profile must be symmetric");
  } else {
    grid.L = f.grid.back();
    grid.r_min = f.grid.front();
    grid.h = (grid.L - grid.r_min) / static_cast<double>(n - 1);
  }
  std::vector<double> w(n - 2);
  const double p = profile.params.p;
  for (std::size_t i = 1; i + 1 < n; ++i) w[i - 1] = p * std::pow(std::abs(f.u[i]), p - 1.0);
  return weighted_spectrum(grid, w, k);
}

std::vector<double> two_hump_check(const Profile& profile, std::span<const double> shifts) {
  if (profile.params.dim != 1) throw DomainError("two-hump superposition is a 1-D construction");
  const SampledFunction single = to_sampled(profile);
  const double p = profile.params.p;
  const double f_single = functional_F(single, p).F;
  if (f_single == 0.0) throw DomainError("F(u) = 0; relative deviation undefined");

  const double half = single.grid.back();
  const double h = (single.grid.back() - single.grid.front()) / static_cast<double>(single.grid.size() - 1);
  std::vector<double> out;
  for (double a : shifts) {
    if (!(a >= 0.0)) throw DomainError("shifts must be >= 0");
    const double lo = -half - a, hi = half;
    const auto m = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
    const double hh = (hi - lo) / static_cast<double>(m);
    SampledFunction two;
    two.dim = 1;
    two.grid.resize(m + 1);
    two.u.resize(m + 1);
    two.du.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      const double x = i == m ? hi : lo + static_cast<double>(i) * hh;
      const StateVec s1 = sample_profile(profile, x);
      const StateVec s2 = sample_profile(profile, x + a);
      two.grid[i] = x;
      two.u[i] = s1[0] + s2[0];
      two.du[i] = s1[1] + s2[1];
    }
    const double f_two = functional_F(two, p).F;
    out.push_back(std::abs(f_two - 2.0 * f_single) / std::abs(f_single));
  }
  return out;
}

double lemma_t(double a, double s, double p) {
  const double mu = std::min(1.0, p - 1.0);
  const double k = (2.0 + mu) / (p + 1.0);
  return std::pow(a + s, p) * s - std::pow(a, p) * s - k * std::pow(a + s, p + 1.0) +
         k * std::pow(a, p + 1.0) + (2.0 + mu) * std::pow(a, p) * s +
         0.5 * mu * p * std::pow(a, p - 1.0) * s * s;
}

double lemma_h(double a, double s, double p) {
  return std::pow(std::abs(a + s), p + 1.0) / (p + 1.0) - std::pow(std::abs(a), p + 1.0) / (p + 1.0) -
         s * std::pow(std::abs(a), p);
}

namespace {

// Scale-free forms at a = 1, s = t, stable for small t.
double h_excess_unit(double t, double p, double eps) {
  const double h = std::expm1((p + 1.0) * std::log1p(t)) / (p + 1.0) - t;
  return h - 0.5 * p * t * t - eps * t * t;
}

double binom_lhs_unit(double t, double p) { return std::expm1(p * std::log1p(t)); }

}  // namespace

InequalityConstants sweep_constants(double p, double eps) {
  if (!(p >= 2.0)) throw DomainError("inequality sweep needs p >= 2");
  InequalityConstants c;
  c.eps = eps;
  double c_eps = 0.0, c_binom = 0.0;
  const int samples = 200000;
  for (int i = 0; i <= samples; ++i) {
    const double t = std::pow(10.0, -8.0 + 16.0 * i / samples);
    c_eps = std::max(c_eps, h_excess_unit(t, p, eps) / std::pow(t, p + 1.0));
    c_binom = std::max(c_binom, binom_lhs_unit(t, p) / (std::pow(t, p) + t));
  }
  // small relative margin over the sampled supremum
  c.c_eps = c_eps * 1.01;
  c.c_binom = c_binom * 1.01;
  return c;
}

InequalityReport scalar_inequalities(double p, std::size_t n_per_axis, const InequalityConstants& c) {
  if (!(p >= 2.0)) throw DomainError("inequality check needs p >= 2");
  if (n_per_axis < 2) throw DomainError("need at least two samples per axis");
  InequalityReport rep;
  rep.constants = c;
  rep.maxT_violation = -std::numeric_limits<double>::infinity();
  rep.maxH_violation = -std::numeric_limits<double>::infinity();
  rep.maxBinom_violation = -std::numeric_limits<double>::infinity();

  const double mu = std::min(1.0, p - 1.0);
  const double k = (2.0 + mu) / (p + 1.0);
  const auto logspace = [&](std::size_t i, std::size_t count) {
    return std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(count - 1));
  };
  for (std::size_t ia = 0; ia < n_per_axis; ++ia) {
    const double a = logspace(ia, n_per_axis);
    for (std::size_t is = 0; is < n_per_axis; ++is) {
      const double s = is == 0 ? 0.0 : logspace(is - 1, n_per_axis - 1);
      ++rep.samples;

      const double apsp = std::pow(a + s, p), ap = std::pow(a, p);
      const double t_terms[] = {apsp * s,
                                -ap * s,
                                -k * std::pow(a + s, p + 1.0),
                                k * std::pow(a, p + 1.0),
                                (2.0 + mu) * ap * s,
                                0.5 * mu * p * std::pow(a, p - 1.0) * s * s};
      double t_val = 0.0, t_scale = 0.0;
      for (double term : t_terms) {
        t_val += term;
        t_scale += std::abs(term);
      }
      rep.maxT_violation = std::max(rep.maxT_violation, t_scale > 0.0 ? -t_val / t_scale : 0.0);

      const double apm1 = std::pow(a, p - 1.0), spp1 = std::pow(s, p + 1.0);
      const double lhs_h = lemma_h(a, s, p) - 0.5 * p * apm1 * s * s;
      const double rhs_h = c.eps * apm1 * s * s + c.c_eps * spp1;
      const double h_scale = std::pow(a + s, p + 1.0) / (p + 1.0) + std::pow(a, p + 1.0) / (p + 1.0) +
                             s * ap + 0.5 * p * apm1 * s * s + rhs_h;
      rep.maxH_violation = std::max(rep.maxH_violation, h_scale > 0.0 ? (lhs_h - rhs_h) / h_scale : 0.0);

      const double lhs_b = apsp - ap;
      const double rhs_b = c.c_binom * (std::pow(s, p) + apm1 * s);
      const double b_scale = apsp + ap + rhs_b;
      rep.maxBinom_violation = std::max(rep.maxBinom_violation, (lhs_b - rhs_b) / b_scale);
    }
  }
  return rep;
}

}  // namespace chpattern
