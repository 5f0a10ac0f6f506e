// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include "chpattern/problem.hpp"

#include <complex>
#include <string>

namespace chpattern {

void ProblemParams::validate() const {
  if (dim < 1) throw DomainError("dimension N must be >= 1, got " + std::to_string(dim));
  if (!std::isfinite(p) || p < 2.0)
    throw DomainError("exponent p must be >= 2, got " + std::to_string(p));
}

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

StateVec eval_rhs_unchecked(const ProblemParams& params, double r, const StateVec& y) {
  const double u = y[0], u1 = y[1], u2 = y[2], u3 = y[3];
  const double p = params.p;
  const double au = std::abs(u);

  // (|u|^{p-1}u)'' + ((N-1)/r)(|u|^{p-1}u)' written so every summand is finite for p >= 2.
  const double pow_pm1 = std::pow(au, p - 1.0);
  const double pow_pm2 = au > 0.0 ? std::pow(au, p - 2.0) : (p == 2.0 ? 1.0 : 0.0);
  double nonlinear = p * pow_pm1 * u2 + p * (p - 1.0) * sign_of(u) * pow_pm2 * u1 * u1;

  double u4 = -u - nonlinear;
  if (params.dim > 1) {
    const double n1 = params.dim - 1.0;
    const double n3 = params.dim - 3.0;
    const double inv_r = 1.0 / r;
    nonlinear = p * n1 * inv_r * pow_pm1 * u1;
    // radial bi-Laplacian: u'''' + 2(N-1)/r u''' + (N-1)(N-3)/r² u'' - (N-1)(N-3)/r³ u'
    u4 -= nonlinear + 2.0 * n1 * inv_r * u3 + n1 * n3 * inv_r * inv_r * u2 -
          n1 * n3 * inv_r * inv_r * inv_r * u1;
  }
  return {u1, u2, u3, u4};
}

StateVec eval_rhs(const ProblemParams& params, double r, const StateVec& y) {
  params.validate();
  if (params.dim > 1 && !(r > 0.0))
    throw DomainError("radial right-hand side needs r > 0 when N > 1");
  return eval_rhs_unchecked(params, r, y);
}

double farfield_derivative(const ProblemParams& params, const FarFieldParams& ff, double r,
                           int order) {
  if (order < 0 || order > 7) throw DomainError("far-field derivative order must be in [0, 7]");
  const std::complex<double> lambda(-1.0 / kSqrt2, 1.0 / kSqrt2);
  const double m = 0.5 * (params.dim - 1.0);

  // d^n/dr^n [r^{-m} e^{λr}] = e^{λr} Σ_j C(n,j) λ^{n-j} (r^{-m})^{(j)}
  std::complex<double> sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    double falling = 1.0;
    for (int i = 0; i < j; ++i) falling *= (-m - i);
    if (falling != 0.0) {
      const double rpow = std::pow(r, -m - j);
      sum += binom * falling * rpow * std::pow(lambda, order - j);
    }
    binom = binom * (order - j) / (j + 1);
  }
  const double theta = (r - ff.k2) / kSqrt2;
  const std::complex<double> carrier = std::polar(ff.k1 * std::exp(-r / kSqrt2), theta);
  return (carrier * sum).real();
}

StateVec farfield_closed_form(const ProblemParams& params, const FarFieldParams& ff, double r) {
  StateVec y{};
  for (int n = 0; n < 4; ++n) y[n] = farfield_derivative(params, ff, r, n);
  return y;
}

ShootState farfield_state(const ProblemParams& params, const FarFieldParams& ff, double radius) {
  params.validate();
  if (!(radius > 0.0)) throw DomainError("far-field radius must be > 0");
  return {radius, farfield_closed_form(params, ff, radius)};
}

FarFieldParams canonical_farfield(FarFieldParams ff) {
  if (ff.k1 < 0.0) {
    ff.k1 = -ff.k1;
    ff.k2 += 0.5 * kPhasePeriod;
  }
  ff.k2 = std::fmod(ff.k2, kPhasePeriod);
  if (ff.k2 < 0.0) ff.k2 += kPhasePeriod;
  if (ff.k2 >= kPhasePeriod) ff.k2 = 0.0;
  return ff;
}

}  // namespace chpattern
