// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dormand–Prince 5(4) with PI step-size control and the 4th-order
// continuous extension, specialised to the 4-component shooting state.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "chpattern/problem.hpp"

namespace chpattern {

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  long max_steps = 2'000'000;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double blowup_threshold = 1e12;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) throw DomainError("rel_tol must be in (0, 1e-6]");
    if (!(abs_tol > 0.0 && abs_tol <= 1e-6)) throw DomainError("abs_tol must be in (0, 1e-6]");
    if (!(h_min > 0.0)) throw DomainError("h_min must be > 0");
    if (!(h_init > 0.0)) throw DomainError("h_init must be > 0");
    if (max_steps <= 0) throw DomainError("max_steps must be > 0");
    if (!(blowup_threshold > 0.0)) throw DomainError("blowup_threshold must be > 0");
  }
  bool operator==(const IntegratorConfig&) const = default;
};

enum class TrajectoryStatus { Completed, StepUnderflow, Blowup, StepLimit };

inline const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::StepUnderflow: return "step_underflow";
    case TrajectoryStatus::Blowup: return "blowup";
    case TrajectoryStatus::StepLimit: return "step_limit";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<double> output_grid;  // nodes actually reached
  std::vector<StateVec> states;
  long step_count = 0;
  long rejected_count = 0;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  double r_reached = 0.0;
  StateVec final_state{};

  bool completed() const { return status == TrajectoryStatus::Completed; }
};

namespace dopri {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 5th minus embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, contd5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
inline constexpr double kSafety = 0.9;
inline constexpr double kBeta = 0.04;
inline constexpr double kExpo = 0.2 - kBeta * 0.75;
inline constexpr double kFacMin = 0.2;   // h shrinks at most 5x
inline constexpr double kFacMax = 10.0;  // h grows at most 10x

}  // namespace dopri

/// Integrates y' = rhs(r, y) from r_from to r_to (either direction) and
/// samples the dense output on out_grid. Failure statuses keep the partial
/// trajectory.
template <class Rhs>
Trajectory integrate(Rhs&& rhs, const StateVec& y0, double r_from, double r_to,
                     std::span<const double> out_grid, const IntegratorConfig& cfg) {
  using namespace dopri;
  cfg.validate();
  const double dir = r_to >= r_from ? 1.0 : -1.0;
  for (std::size_t i = 0; i < out_grid.size(); ++i) {
    const double x = out_grid[i];
    if ((x - r_from) * dir < 0.0 || (r_to - x) * dir < 0.0)
      throw DomainError("output grid leaves the integration interval");
    if (i > 0 && !((x - out_grid[i - 1]) * dir > 0.0))
      throw DomainError("output grid must be strictly monotone in the integration direction");
  }

  Trajectory traj;
  traj.output_grid.reserve(out_grid.size());
  traj.states.reserve(out_grid.size());
  std::size_t next_out = 0;

  auto emit = [&](double r, const StateVec& y) {
    traj.output_grid.push_back(r);
    traj.states.push_back(y);
    ++next_out;
  };
  auto too_big = [&](const StateVec& y) {
    for (double v : y)
      if (!std::isfinite(v) || std::abs(v) > cfg.blowup_threshold) return true;
    return false;
  };

  double r = r_from;
  StateVec y = y0;
  traj.r_reached = r;
  traj.final_state = y;
  while (next_out < out_grid.size() && out_grid[next_out] == r_from) emit(r_from, y);
  if (too_big(y)) {
    traj.status = TrajectoryStatus::Blowup;
    return traj;
  }
  if (r_from == r_to) {
    return traj;
  }

  const double span = std::abs(r_to - r_from);
  double h = std::min(cfg.h_init, span);
  double facold = 1e-4;
  bool reject = false;
  StateVec k1 = rhs(r, y), k2, k3, k4, k5, k6, k7, ytmp, ynew;

  auto axpy = [](const StateVec& base, double h_, std::initializer_list<std::pair<double, const StateVec*>> terms) {
    StateVec out = base;
    for (auto [c, k] : terms)
      for (int i = 0; i < 4; ++i) out[i] += h_ * c * (*k)[i];
    return out;
  };

  while (true) {
    if (traj.step_count >= cfg.max_steps) {
      traj.status = TrajectoryStatus::StepLimit;
      return traj;
    }
    const double remaining = std::abs(r_to - r);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h < cfg.h_min) {
      traj.status = TrajectoryStatus::StepUnderflow;
      return traj;
    }
    const double hs = dir * h;

    ytmp = axpy(y, hs, {{a21, &k1}});
    k2 = rhs(r + c2 * hs, ytmp);
    ytmp = axpy(y, hs, {{a31, &k1}, {a32, &k2}});
    k3 = rhs(r + c3 * hs, ytmp);
    ytmp = axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    k4 = rhs(r + c4 * hs, ytmp);
    ytmp = axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    k5 = rhs(r + c5 * hs, ytmp);
    ytmp = axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    const double r_new = last ? r_to : r + hs;
    k6 = rhs(r + hs, ytmp);
    ynew = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    k7 = rhs(r_new, ynew);
    ++traj.step_count;

    double err = 0.0;
    bool finite = true;
    for (int i = 0; i < 4; ++i) {
      const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = e / sc;
      if (!std::isfinite(q)) finite = false;
      err += q * q;
    }
    err = std::sqrt(err / 4.0);

    if (!finite) {
      // Shrink hard on overflow inside the stages; give up once h is tiny.
      ++traj.rejected_count;
      h *= kFacMin;
      reject = true;
      continue;
    }

    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      // accepted
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      double h_next = h / fac;
      facold = std::max(err, 1e-4);
      if (reject) h_next = std::min(h_next, h);

      // dense output on [r, r_new]
      if (next_out < out_grid.size()) {
        StateVec rc1 = y, rc2, rc3, rc4, rc5;
        for (int i = 0; i < 4; ++i) {
          rc2[i] = ynew[i] - y[i];
          rc3[i] = hs * k1[i] - rc2[i];
          rc4[i] = rc2[i] - hs * k7[i] - rc3[i];
          rc5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                         d7 * k7[i]);
        }
        while (next_out < out_grid.size() && (r_new - out_grid[next_out]) * dir >= 0.0) {
          const double x = out_grid[next_out];
          if (x == r_new) {
            emit(x, ynew);
            continue;
          }
          const double theta = (x - r) / hs;
          const double theta1 = 1.0 - theta;
          StateVec yi;
          for (int i = 0; i < 4; ++i)
            yi[i] = rc1[i] + theta * (rc2[i] + theta1 * (rc3[i] + theta * (rc4[i] + theta1 * rc5[i])));
          emit(x, yi);
        }
      }

      y = ynew;
      k1 = k7;
      r = r_new;
      traj.r_reached = r;
      traj.final_state = y;
      if (too_big(y)) {
        traj.status = TrajectoryStatus::Blowup;
        return traj;
      }
      if (last) break;
      h = h_next;
      reject = false;
    } else {
      ++traj.rejected_count;
      h /= std::min(1.0 / kFacMin, fac11 / kSafety);
      reject = true;
    }
  }
  traj.status = TrajectoryStatus::Completed;
  return traj;
}

}  // namespace chpattern
