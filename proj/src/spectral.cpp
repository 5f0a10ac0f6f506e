// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

namespace chpattern {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double identity_defect(const SymTridiagonal& lap, std::span<const double> psi, double lambda) {
  const std::vector<double> dpsi = lap.apply(psi);
  const double lhs = dot(dpsi, dpsi) + dot(psi, psi);
  const double rhs = lambda * dot(dpsi, psi);
  return std::abs(lhs - rhs) / lhs;
}

// D² + I as a bandwidth-2 SPD matrix.
BandedSpd square_plus_identity(const SymTridiagonal& lap) {
  const std::size_t n = lap.size();
  const auto& d = lap.diag;
  const auto& e = lap.off;
  BandedSpd m(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = d[i] * d[i] + 1.0;
    if (i > 0) diag += e[i - 1] * e[i - 1];
    if (i + 1 < n) diag += e[i] * e[i];
    m.at(i, i) = diag;
    if (i > 0) m.at(i, i - 1) = e[i - 1] * (d[i - 1] + d[i]);
    if (i > 1) m.at(i, i - 2) = e[i - 1] * e[i - 2];
  }
  m.factorize();
  return m;
}

}  // namespace

void GridSpec::validate() const {
  if (dim < 1) throw DomainError("grid dimension must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid spacing h must be > 0");
  if (dim > 1 && !(r_min >= 0.0)) throw DomainError("radial grid needs r_min >= 0");
  const double length = dim == 1 ? 2.0 * L : L - r_min;
  if (!(length > 0.0)) throw DomainError("grid length must be > 0");
  const double ratio = length / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw DomainError("grid length must be an integer multiple of h");
  if (rounded < 3.0) throw DomainError("grid needs at least two interior nodes");
}

std::size_t GridSpec::intervals() const {
  validate();
  const double length = dim == 1 ? 2.0 * L : L - r_min;
  return static_cast<std::size_t>(std::llround(length / h));
}

std::vector<double> GridSpec::nodes() const {
  const std::size_t m = intervals();
  const double start = dim == 1 ? -L : r_min;
  std::vector<double> x(m - 1);
  for (std::size_t i = 1; i < m; ++i) x[i - 1] = start + static_cast<double>(i) * h;
  return x;
}

SymTridiagonal assemble_lap(const GridSpec& grid) {
  const std::vector<double> x = grid.nodes();
  const std::size_t n = x.size();
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  SymTridiagonal t;
  t.diag.assign(n, 2.0 * inv_h2);
  t.off.assign(n - 1, -inv_h2);
  if (grid.dim > 1) {
    const double c = 0.25 * (grid.dim - 1.0) * (grid.dim - 3.0);
    if (c != 0.0)
      for (std::size_t i = 0; i < n; ++i) t.diag[i] += c / (x[i] * x[i]);
  }
  return t;
}

std::vector<double> apply_nonlocal(const SymTridiagonal& lap, std::span<const double> x) {
  std::vector<double> y = lap.apply(x);
  const std::vector<double> z = lap.solve(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
  return y;
}

SpectrumReport spectrum_of(const SymTridiagonal& lap, std::size_t k) {
  const std::size_t n = lap.size();
  if (k == 0 || k > n) throw DomainError("requested eigenvalue count must be in [1, n]");
  if (lap.count_below(0.0) > 0 || lap.eigenvalue(0) <= 0.0)
    throw DomainError("discrete Laplacian is not positive definite");

  const std::size_t j0 = lap.count_below(1.0);
  const std::size_t lo = j0 >= k ? j0 - k : 0;
  const std::size_t hi = std::min(n, j0 + k);
  std::vector<std::tuple<double, double, std::size_t>> cand;  // (λ, d, index)
  for (std::size_t j = lo; j < hi; ++j) {
    const double d = lap.eigenvalue(j);
    cand.emplace_back(d + 1.0 / d, d, j);
  }
  std::sort(cand.begin(), cand.end());
  cand.resize(k);

  // eigenvectors in ascending d order so nearby ones can be orthogonalised
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::get<1>(cand[a]) < std::get<1>(cand[b]); });
  const double tnorm = lap.norm_inf();
  std::vector<std::vector<double>> vecs(k);
  std::vector<std::size_t> failed;
  std::vector<std::vector<double>> close;
  double prev_d = -std::numeric_limits<double>::infinity();
  for (std::size_t oi : order) {
    const double d = std::get<1>(cand[oi]);
    if (d - prev_d > 1e-3 * tnorm) close.clear();
    const EigenVectorResult ev =
        inverse_iteration(lap, d, close, static_cast<unsigned>(std::get<2>(cand[oi])));
    if (!(ev.residual <= 1e-8 * tnorm)) failed.push_back(oi);
    vecs[oi] = ev.vector;
    close.push_back(ev.vector);
    prev_d = d;
  }
  if (!failed.empty()) throw ConvergenceError("inverse iteration did not converge", failed);

  SpectrumReport rep;
  rep.weighted = false;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& [lambda, d, j] = cand[i];
    rep.eigenvalues.push_back(lambda);
    rep.d_values.push_back(d);
    rep.identity_defects.push_back(identity_defect(lap, vecs[i], lambda));
    rep.vectors.push_back(std::move(vecs[i]));
  }
  return rep;
}

SpectrumReport spectrum_L(const GridSpec& grid, std::size_t k) {
  SpectrumReport rep = spectrum_of(assemble_lap(grid), k);
  rep.grid = grid;
  return rep;
}

SpectrumReport weighted_spectrum_of(const SymTridiagonal& lap, std::span<const double> weight,
                                    std::size_t k) {
  const std::size_t n = lap.size();
  if (weight.size() != n) throw DomainError("weight must be sampled on the interior nodes");
  if (k == 0 || k > n) throw DomainError("requested eigenvalue count must be in [1, n]");
  double wmax = 0.0;
  for (double w : weight) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("weight must be finite and nonnegative");
    wmax = std::max(wmax, w);
  }
  if (wmax < 1e-12) throw SingularWeight("weight vanishes on the whole grid");

  std::vector<double> sqrtw(n);
  for (std::size_t i = 0; i < n; ++i) sqrtw[i] = std::sqrt(weight[i]);
  const BandedSpd shifted_square = square_plus_identity(lap);

  // B x = W^{1/2} (D + D^{-1})^{-1} W^{1/2} x, with (D + D^{-1})^{-1} = (D² + I)^{-1} D
  auto apply_b = [&](std::span<const double> x) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = sqrtw[i] * x[i];
    t = shifted_square.solve(lap.apply(t));
    for (std::size_t i = 0; i < n; ++i) t[i] *= sqrtw[i];
    return t;
  };

  std::mt19937_64 rng(0x1a2c2052ULL);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = dist(rng) * sqrtw[i];
  {
    const double nq = std::sqrt(dot(q, q));
    for (double& v : q) v /= nq;
  }

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> ritz;
  std::vector<std::vector<double>> ritz_vecs;
  bool converged = false;
  const std::size_t max_steps = n;

  auto ritz_pairs = [&](std::size_t m, std::size_t want, double last_beta) {
    SymTridiagonal t;
    t.diag.assign(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(m));
    t.off.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(m - 1));
    ritz.clear();
    ritz_vecs.clear();
    bool ok = true;
    std::vector<std::vector<double>> close;
    double prev = std::numeric_limits<double>::infinity();
    const double scale = std::max(t.norm_inf(), std::numeric_limits<double>::min());
    for (std::size_t i = 0; i < want && i < m; ++i) {
      const double theta = t.eigenvalue(m - 1 - i);
      if (prev - theta > 1e-3 * scale) close.clear();
      const EigenVectorResult ev = inverse_iteration(t, theta, close, static_cast<unsigned>(i));
      close.push_back(ev.vector);
      prev = theta;
      ritz.push_back(theta);
      ritz_vecs.push_back(ev.vector);
      if (std::abs(last_beta * ev.vector.back()) > 1e-13 * scale) ok = false;
    }
    return ok;
  };

  for (std::size_t j = 0; j < max_steps; ++j) {
    basis.push_back(q);
    std::vector<double> z = apply_b(q);
    const double a = dot(q, z);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(b, z);
        for (std::size_t i = 0; i < n; ++i) z[i] -= c * b[i];
      }
    }
    const double bnext = std::sqrt(dot(z, z));
    const std::size_t m = j + 1;
    const bool breakdown = bnext <= 1e-14 * std::max(std::abs(a), 1e-300);
    if (breakdown || m == max_steps || (m >= k + 2 && m % 5 == 0)) {
      if (ritz_pairs(m, k, breakdown ? 0.0 : bnext) || breakdown || m == max_steps) {
        converged = true;
        break;
      }
    }
    beta.push_back(bnext);
    for (std::size_t i = 0; i < n; ++i) q[i] = z[i] / bnext;
  }
  if (!converged) throw ConvergenceError("Lanczos iteration did not converge", {});

  SpectrumReport rep;
  rep.weighted = true;
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < ritz.size(); ++i) {
    const double theta = ritz[i];
    if (!(theta > 1e-14 * ritz.front())) break;  // null space of the weight
    std::vector<double> x(n, 0.0);
    for (std::size_t b = 0; b < ritz_vecs[i].size(); ++b)
      for (std::size_t r = 0; r < n; ++r) x[r] += ritz_vecs[i][b] * basis[b][r];
    // ψ = (D + D^{-1})^{-1} W^{1/2} x
    std::vector<double> psi(n);
    for (std::size_t r = 0; r < n; ++r) psi[r] = sqrtw[r] * x[r];
    psi = shifted_square.solve(lap.apply(psi));
    const double npsi = std::sqrt(dot(psi, psi));
    for (double& v : psi) v /= npsi;

    const double lambda = 1.0 / theta;
    const std::vector<double> apsi = apply_nonlocal(lap, psi);
    double wpsi = 0.0;
    for (std::size_t r = 0; r < n; ++r) wpsi += weight[r] * psi[r] * psi[r];
    const double lhs = dot(psi, apsi);
    rep.eigenvalues.push_back(lambda);
    rep.identity_defects.push_back(std::abs(lhs - lambda * wpsi) / lhs);
    rep.vectors.push_back(std::move(psi));
  }
  return rep;
}

SpectrumReport weighted_spectrum(const GridSpec& grid, std::span<const double> weight, std::size_t k) {
  SpectrumReport rep = weighted_spectrum_of(assemble_lap(grid), weight, k);
  rep.grid = grid;
  return rep;
}

double rayleigh_quotient(const SymTridiagonal& lap, std::span<const double> v) {
  if (v.size() != lap.size()) throw DomainError("vector size does not match the grid");
  const std::vector<double> dv = lap.apply(v);
  const double denom = dot(dv, v);
  if (!(denom > 0.0)) throw DomainError("Dirichlet energy <Dv, v> is not positive");
  return (dot(dv, dv) + dot(v, v)) / denom;
}

double rayleigh_quotient(const GridSpec& grid, std::span<const double> v) {
  return rayleigh_quotient(assemble_lap(grid), v);
}

}  // namespace chpattern
