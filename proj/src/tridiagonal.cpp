// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "chpattern/problem.hpp"

namespace chpattern {

std::vector<double> SymTridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

double SymTridiagonal::norm_inf() const {
  const std::size_t n = size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::abs(diag[i]);
    if (i > 0) s += std::abs(off[i - 1]);
    if (i + 1 < n) s += std::abs(off[i]);
    m = std::max(m, s);
  }
  return m;
}

std::size_t SymTridiagonal::count_below(double x) const {
  const std::size_t n = size();
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, norm_inf());
  std::size_t count = 0;
  double q = diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = diag[i] - x - off[i - 1] * off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double SymTridiagonal::eigenvalue(std::size_t k) const {
  const std::size_t n = size();
  if (k >= n) throw DomainError("eigenvalue index out of range");
  // Gershgorin interval
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double pad = 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + std::numeric_limits<double>::min();
  lo -= pad;
  hi += pad;
  for (int it = 0; it < 256; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> SymTridiagonal::solve_shifted(double shift, std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DomainError("right-hand side size mismatch");
  std::vector<double> x(b.begin(), b.end());
  if (n == 1) {
    x[0] /= diag[0] - shift;
    return x;
  }
  // LU with partial pivoting (LAPACK dgttrf/dgttrs layout).
  std::vector<double> dl(off), d(n), du(off), du2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<char> swapped(n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(norm_inf(), 1e-300);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = 1;
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!swapped[i]) {
      x[i + 1] -= dl[i] * x[i];
    } else {
      const double temp = x[i];
      x[i] = x[i + 1];
      x[i + 1] = temp - dl[i] * x[i];
    }
  }
  x[n - 1] /= d[n - 1];
  x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t ii = n - 2; ii-- > 0;)
    x[ii] = (x[ii] - du[ii] * x[ii + 1] - du2[ii] * x[ii + 2]) / d[ii];
  return x;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double nrm = std::sqrt(dot(v, v));
  if (nrm > 0.0)
    for (double& x : v) x /= nrm;
}

}  // namespace

EigenVectorResult inverse_iteration(const SymTridiagonal& t, double lambda,
                                    std::span<const std::vector<double>> previous, unsigned seed) {
  const std::size_t n = t.size();
  std::mt19937_64 rng(0x5eedULL + seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  normalize(x);

  const double tnorm = std::max(t.norm_inf(), std::numeric_limits<double>::min());
  EigenVectorResult best{x, std::numeric_limits<double>::infinity()};
  for (int it = 0; it < 8; ++it) {
    for (const auto& q : previous) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < n; ++i) x[i] -= c * q[i];
    }
    x = t.solve_shifted(lambda, x);
    for (const auto& q : previous) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < n; ++i) x[i] -= c * q[i];
    }
    normalize(x);
    const std::vector<double> tx = t.apply(x);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (tx[i] - lambda * x[i]) * (tx[i] - lambda * x[i]);
    const double res = std::sqrt(r2);
    if (res < best.residual) best = {x, res};
    if (it >= 1 && res <= 64.0 * n * std::numeric_limits<double>::epsilon() * tnorm) break;
  }
  return best;
}

BandedSpd::BandedSpd(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), band_(n * (bandwidth + 1), 0.0) {}

double& BandedSpd::at(std::size_t i, std::size_t j) {
  if (j > i || i - j > bw_) throw DomainError("banded index outside the stored lower band");
  return band_[i * (bw_ + 1) + (i - j)];
}

void BandedSpd::factorize() {
  // L Lᵀ with L stored in place of the lower band
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i >= bw_ ? i - bw_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      double s = band_[i * (bw_ + 1) + (i - j)];
      const std::size_t k0 = std::max(j0, j >= bw_ ? j - bw_ : 0);
      for (std::size_t k = k0; k < j; ++k)
        s -= band_[i * (bw_ + 1) + (i - k)] * band_[j * (bw_ + 1) + (j - k)];
      if (j == i) {
        if (!(s > 0.0)) throw DomainError("banded matrix is not positive definite");
        band_[i * (bw_ + 1)] = std::sqrt(s);
      } else {
        band_[i * (bw_ + 1) + (i - j)] = s / band_[j * (bw_ + 1)];
      }
    }
  }
  factored_ = true;
}

std::vector<double> BandedSpd::solve(std::span<const double> b) const {
  if (!factored_) throw DomainError("banded matrix used before factorize()");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i >= bw_ ? i - bw_ : 0;
    double s = x[i];
    for (std::size_t k = j0; k < i; ++k) s -= band_[i * (bw_ + 1) + (i - k)] * x[k];
    x[i] = s / band_[i * (bw_ + 1)];
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = x[ii];
    const std::size_t k1 = std::min(n_ - 1, ii + bw_);
    for (std::size_t k = ii + 1; k <= k1; ++k) s -= band_[k * (bw_ + 1) + (k - ii)] * x[k];
    x[ii] = s / band_[ii * (bw_ + 1)];
  }
  return x;
}

}  // namespace chpattern
