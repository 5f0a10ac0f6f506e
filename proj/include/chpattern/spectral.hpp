// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Discrete non-local operator L = -Δ + (-Δ)^{-1} on a Dirichlet box.
//
// With D the 3-point discretisation of -Δ, L_h = D + D^{-1} shares D's
// eigenvectors and has eigenvalues d + 1/d >= 2. The generalised form
// (D² + I)ψ = λ Dψ is the discrete counterpart of Δ²ψ + ψ = -λΔψ.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chpattern/problem.hpp"
#include "chpattern/tridiagonal.hpp"

namespace chpattern {

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::size_t> indices)
      : std::runtime_error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class SingularWeight : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N = 1: the line [-L, L]. N > 1: the radial interval [r_min, L] in the
/// symmetrised variable w = r^{(N-1)/2} u. Dirichlet at both ends.
struct GridSpec {
  double L = 30.0;
  double h = 0.05;
  int dim = 1;
  double r_min = 0.0;

  void validate() const;
  std::size_t intervals() const;
  std::size_t interior_size() const { return intervals() - 1; }
  /// Coordinates of the interior nodes.
  std::vector<double> nodes() const;
  bool operator==(const GridSpec&) const = default;
};

/// Discrete -Δ with Dirichlet ends; radial grids add (N-1)(N-3)/(4r²).
SymTridiagonal assemble_lap(const GridSpec& grid);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> d_values;     // matching eigenvalues of D
  std::vector<double> identity_defects;
  std::vector<std::vector<double>> vectors;  // eigenvectors on interior nodes
  GridSpec grid;
  bool weighted = false;
};

/// The k smallest eigenvalues of D + D^{-1}. Since d + 1/d is smallest for d
/// nearest 1, the d-eigenvalues are taken around d = 1 (Sturm count), not
/// from the bottom of D's spectrum.
SpectrumReport spectrum_L(const GridSpec& grid, std::size_t k);

/// Same as spectrum_L for an explicit D (used by fixtures without a box).
SpectrumReport spectrum_of(const SymTridiagonal& lap, std::size_t k);

/// Smallest k eigenvalues of (D + D^{-1})ψ = λ diag(a) ψ. The largest
/// eigenvalues μ = 1/λ of diag(a)^{1/2} (D + D^{-1})^{-1} diag(a)^{1/2} are
/// found by Lanczos (a Krylov-accelerated power iteration) with full
/// reorthogonalisation.
SpectrumReport weighted_spectrum(const GridSpec& grid, std::span<const double> weight, std::size_t k);
SpectrumReport weighted_spectrum_of(const SymTridiagonal& lap, std::span<const double> weight,
                                    std::size_t k);

/// (⟨Dv,Dv⟩ + ⟨v,v⟩) / ⟨Dv,v⟩.
double rayleigh_quotient(const GridSpec& grid, std::span<const double> v);
double rayleigh_quotient(const SymTridiagonal& lap, std::span<const double> v);

/// Applies D + D^{-1}.
std::vector<double> apply_nonlocal(const SymTridiagonal& lap, std::span<const double> x);

}  // namespace chpattern
