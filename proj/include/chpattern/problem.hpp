// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chpattern {

/// Raised when an operation is called outside its mathematical domain
/// (non-positive radius with singular coefficients, p < 2, bad grids, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kPi = std::numbers::pi;

/// Period of the far-field phase parameter k2.
inline constexpr double kPhasePeriod = 2.0 * kPi * kSqrt2;

/// Instance of -Δ²u - u - Δ(|u|^{p-1}u) = 0 in R^N.
struct ProblemParams {
  int dim = 1;
  double p = 3.0;

  void validate() const;
  bool operator==(const ProblemParams&) const = default;
};

/// (u, u', u'', u''') at some radius.
using StateVec = std::array<double, 4>;

struct ShootState {
  double r = 0.0;
  StateVec y{};
};

/// Amplitude and phase of the decaying far-field mode
/// u ~ k1 r^{-(N-1)/2} e^{-r/√2} cos((r - k2)/√2).
struct FarFieldParams {
  double k1 = 0.0;
  double k2 = 0.0;
  bool operator==(const FarFieldParams&) const = default;
};

/// d/dr of (u, u', u'', u''') for the radial stationary equation.
/// Throws DomainError for r <= 0 when N > 1, or p < 2.
StateVec eval_rhs(const ProblemParams& params, double r, const StateVec& y);
inline StateVec eval_rhs(const ProblemParams& params, const ShootState& s) {
  return eval_rhs(params, s.r, s.y);
}

/// Same as eval_rhs without argument checks; hot path for the integrator.
StateVec eval_rhs_unchecked(const ProblemParams& params, double r, const StateVec& y);

/// Closed-form far-field mode and its first three derivatives at r.
/// No domain check; r = 0 is meaningful only for N = 1.
StateVec farfield_closed_form(const ProblemParams& params, const FarFieldParams& ff, double r);

/// Closed-form derivative of order `order` (0..7) of the far-field mode.
double farfield_derivative(const ProblemParams& params, const FarFieldParams& ff, double r,
                           int order);

/// Seed state for backward shooting at radius R > 0.
ShootState farfield_state(const ProblemParams& params, const FarFieldParams& ff, double radius);

/// Maps (k1, k2) onto k1 >= 0, k2 in [0, 2π√2) without changing the profile.
FarFieldParams canonical_farfield(FarFieldParams ff);

}  // namespace chpattern
