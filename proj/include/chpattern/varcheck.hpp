// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chpattern/shoot.hpp"
#include "chpattern/spectral.hpp"

namespace chpattern {

/// Samples of a function on a uniform grid. For dim == 1 the grid is a
/// line segment; for dim > 1 it is a radial interval with measure r^{N-1}.
/// `du` is optional; when absent the gradient is taken by finite differences.
struct SampledFunction {
  int dim = 1;
  std::vector<double> grid;
  std::vector<double> u;
  std::vector<double> du;
};

struct PoissonResult {
  std::vector<double> v;
  bool boundary_warning = false;  // |u| at an end exceeds 1e-6 ‖u‖∞
};

/// Solves -Δv = u with v = 0 at both grid ends (radially symmetrised for N > 1).
PoissonResult poisson_inverse(std::span<const double> grid, std::span<const double> u, int dim);

struct FunctionalReport {
  double dirichlet = 0.0;  // ∫|∇u|²
  double nonlocal = 0.0;   // ∫u v, v = (-Δ)^{-1}u
  double potential = 0.0;  // ∫|u|^{p+1}
  double F = 0.0;
  double identity_defect = 0.0;
  bool boundary_warning = false;
};

FunctionalReport functional_F(const SampledFunction& f, double p);

/// Even/odd N = 1 profiles are reflected to [-R, R]; radial ones keep [r0, R].
SampledFunction to_sampled(const Profile& profile);
FunctionalReport functional_F(const Profile& profile);

/// |F(u(x) + u(x + a)) - 2F(u)| / |F(u)| for each shift a.
std::vector<double> two_hump_check(const Profile& profile, std::span<const double> shifts);

/// Weighted spectrum of (-Δ + (-Δ)^{-1})ψ = λ p|u|^{p-1}ψ on the profile's own
/// grid (reflected to [-R, R] for N = 1).
SpectrumReport linearized_spectrum(const Profile& profile, std::size_t k);

/// T(s) with μ = min{1, p-1}.
double lemma_t(double a, double s, double p);
/// H(a, s) = |a+s|^{p+1}/(p+1) - |a|^{p+1}/(p+1) - s|a|^p.
double lemma_h(double a, double s, double p);

struct InequalityConstants {
  double eps = 0.1;
  double c_eps = 1.0;    // H(a,s) - (p/2)|a|^{p-1}s² <= eps |a|^{p-1} s² + c_eps s^{p+1}
  double c_binom = 2.0;  // |a+s|^p - |a|^p <= c_binom (s^p + |a|^{p-1} s)
};

/// Smallest constants (up to the sweep resolution) making the H and binomial
/// bounds hold, using their homogeneity in (a, s) to sweep the ratio t = s/a.
InequalityConstants sweep_constants(double p, double eps = 0.1);

struct InequalityReport {
  double maxT_violation = 0.0;
  double maxH_violation = 0.0;
  double maxBinom_violation = 0.0;
  InequalityConstants constants;
  std::size_t samples = 0;
};

/// Worst normalised violations (negative = satisfied) over the lattice
/// a ∈ [1e-3, 1e3] log-uniform x s ∈ {0} ∪ [1e-3, 1e3] log-uniform,
/// n_per_axis points per axis. Each violation is divided by the sum of the
/// absolute values of the terms involved, so rounding is measured relatively.
InequalityReport scalar_inequalities(double p, std::size_t n_per_axis, const InequalityConstants& c);

}  // namespace chpattern
