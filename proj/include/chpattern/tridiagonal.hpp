// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace chpattern {

/// Symmetric tridiagonal matrix: diag[0..n), off[0..n-1) on both off-diagonals.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  double norm_inf() const;

  /// Number of eigenvalues strictly below x (Sturm sequence / LDLᵀ inertia).
  std::size_t count_below(double x) const;
  /// k-th smallest eigenvalue (0-based) by bisection to full precision.
  double eigenvalue(std::size_t k) const;
  /// Solves (T - shift I) x = b with partial pivoting.
  std::vector<double> solve_shifted(double shift, std::span<const double> b) const;
  std::vector<double> solve(std::span<const double> b) const { return solve_shifted(0.0, b); }
};

struct EigenVectorResult {
  std::vector<double> vector;  // unit 2-norm
  double residual = 0.0;       // ‖T x - λ x‖₂
};

/// Inverse iteration for a computed eigenvalue; `previous` holds already
/// accepted eigenvectors of nearby eigenvalues to orthogonalise against.
/// The start vector is a fixed function of `seed`, so runs are reproducible.
EigenVectorResult inverse_iteration(const SymTridiagonal& t, double lambda,
                                    std::span<const std::vector<double>> previous, unsigned seed);

/// Symmetric positive definite banded matrix (lower half stored by diagonal),
/// with an in-place Cholesky factorisation.
class BandedSpd {
 public:
  BandedSpd(std::size_t n, std::size_t bandwidth);
  double& at(std::size_t i, std::size_t j);  // requires i >= j, i - j <= bandwidth
  void factorize();
  std::vector<double> solve(std::span<const double> b) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_, bw_;
  std::vector<double> band_;  // band_[i * (bw_ + 1) + (i - j)]
  bool factored_ = false;
};

}  // namespace chpattern
