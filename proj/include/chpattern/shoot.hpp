// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chpattern/integrate.hpp"
#include "chpattern/problem.hpp"

namespace chpattern {

/// Even: u'(0) = u'''(0) = 0. Odd: u(0) = u''(0) = 0. Forward: shot from the
/// origin without root finding.
enum class Symmetry { Even, Odd, Forward };

const char* to_string(Symmetry s);
Symmetry symmetry_from_string(const std::string& s);

/// Inner endpoint of backward shots for N > 1 (the ODE has 1/r³ coefficients).
inline constexpr double kRadialInnerRadius = 1e-3;

double inner_radius(const ProblemParams& params);

struct Profile {
  ProblemParams params;
  Symmetry symmetry = Symmetry::Even;
  std::variant<FarFieldParams, double> source = FarFieldParams{};
  std::vector<double> grid;
  std::vector<double> u, u1, u2, u3;
  double ode_residual_max = 0.0;
  TrajectoryStatus status = TrajectoryStatus::Completed;

  std::size_t size() const { return grid.size(); }
  double sup_norm() const;
  StateVec state(std::size_t i) const { return {u[i], u1[i], u2[i], u3[i]}; }
};

/// Max over interior nodes of |u'''' - rhs| with u'''' from a 7-point
/// difference of the stored u''' samples: central, or shifted to one side of a
/// zero of u when the nonlinearity is not smooth there (p not an odd integer).
double ode_residual(const Profile& profile);
/// Pointwise version of ode_residual; the three nodes at each end are zero.
std::vector<double> ode_residual_series(const Profile& profile);

/// Least-squares slope of log sqrt(u² + (u + √2 u')²) over the last third of
/// the grid. For N = 1 the far-field mode gives exactly -1/√2.
double tail_decay_rate(const Profile& profile);

/// Origin residuals of a backward shot: (u', u''') for Even, (u, u'') for Odd.
struct ResidualPair {
  double first = 0.0;
  double second = 0.0;

  bool finite() const { return std::isfinite(first) && std::isfinite(second); }
  double inf_norm() const { return std::max(std::abs(first), std::abs(second)); }
  double sum_squares() const { return first * first + second * second; }
  static ResidualPair non_finite();
};

/// Backward shot from farfield_state(ff, R) to the inner endpoint. The
/// absolute tolerance is measured in units of the far-field state magnitude,
/// so the map is accurate at any amplitude. Integrator failure yields NaN.
ResidualPair shooting_map(const ProblemParams& params, Symmetry sym, const FarFieldParams& ff,
                          double radius, const IntegratorConfig& cfg);

/// Integrates the backward shot and samples it on inner..R with spacing ~h_out.
Profile integrate_backward_profile(const ProblemParams& params, Symmetry sym,
                                   const FarFieldParams& ff, double radius, double h_out,
                                   const IntegratorConfig& cfg);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iters = 40;
  double fd_step = 1e-7;
  int max_halvings = 8;
  bool operator==(const NewtonOptions&) const = default;
};

enum class NewtonStatus { Converged, NotConverged, SingularJacobian, NonFiniteSeed };
const char* to_string(NewtonStatus s);

struct NewtonResult {
  FarFieldParams root;
  ResidualPair residual;
  int iters = 0;
  NewtonStatus status = NewtonStatus::NotConverged;
  bool converged() const { return status == NewtonStatus::Converged; }
};

using ResidualMap = std::function<ResidualPair(const FarFieldParams&)>;

/// Damped Newton with a forward-difference Jacobian.
NewtonResult newton2d(const ResidualMap& map, const FarFieldParams& seed, const NewtonOptions& opts);

struct ShootResult {
  FarFieldParams ff;
  ResidualPair residual;
  double origin_defect = 0.0;
  int newton_iters = 0;
  bool converged = false;
  NewtonStatus status = NewtonStatus::NotConverged;
  Profile profile;
};

struct ShootSettings {
  double radius = 25.0;
  double h_out = 0.01;
  IntegratorConfig integrator;
  NewtonOptions newton;
  bool operator==(const ShootSettings&) const = default;
};

/// newton2d on the shooting map followed by a profile integration at the root.
ShootResult solve_profile(const ProblemParams& params, Symmetry sym, const FarFieldParams& seed,
                          const ShootSettings& settings);

struct ScanRequest {
  std::array<double, 2> k1_range{1e-3, 10.0};
  std::array<double, 2> k2_range{0.0, kPhasePeriod};
  std::array<int, 2> counts{12, 16};
  double zero_threshold = 1e-6;
  int threads = 1;
  bool operator==(const ScanRequest&) const = default;
};

/// Seeds: k1 log-spaced (inclusive), k2 uniform with the upper end excluded.
std::vector<FarFieldParams> scan_seeds(const ScanRequest& req);

/// Runs solve_profile from every seed, keeps converged non-trivial roots,
/// deduplicates and sorts by sup norm.
std::vector<ShootResult> scan(const ProblemParams& params, Symmetry sym, const ScanRequest& req,
                              const ShootSettings& settings);

inline constexpr double kDedupeL2Tol = 1e-4;

/// Relative L² distance min(‖a - b‖, ‖a + b‖) / max(‖a‖, ‖b‖) on the shared grid.
double profile_distance(const Profile& a, const Profile& b);

/// Collapses duplicates (same profile up to sign, or farfield parameters
/// related by the exact symmetries); keeps the smallest origin defect.
std::vector<ShootResult> dedupe(const std::vector<ShootResult>& results);

/// N = 1 shot from (a, 0, 0, 0) at r = 0 out to r = span.
Profile forward_profile(const ProblemParams& params, double a, double span,
                        const IntegratorConfig& cfg, double h_out = 0.01);

enum class PatternClass { Periodic, Transitional, Chaotic, Indeterminate };
const char* to_string(PatternClass c);

inline constexpr double kPeriodicCv = 0.05;
inline constexpr double kChaoticCv = 0.25;
inline constexpr std::size_t kMinPatternEvents = 8;

struct SpacingStats {
  std::size_t count = 0;  // number of located events
  double mean = 0.0;
  double cv = 0.0;
};

struct PatternStats {
  std::size_t n_extrema = 0;
  SpacingStats extrema;  // interior extrema of u
  SpacingStats nodes;    // sign changes of u
  double spacing_mean = 0.0;
  double spacing_cv = 0.0;
  PatternClass classification = PatternClass::Indeterminate;
};

/// Coefficient of variation of consecutive differences of sorted positions.
SpacingStats spacing_stats(const std::vector<double>& positions);
PatternClass classify_cv(double cv, std::size_t n_events);

/// Positions where `values` changes sign, refined by a local quadratic fit.
std::vector<double> sign_change_positions(const std::vector<double>& grid,
                                          const std::vector<double>& values);

PatternStats pattern_stats(const Profile& profile);

/// Sample of u and its derivatives at arbitrary x, extended to x < 0 by the
/// profile's parity (Even/Odd) and cubic Hermite interpolation in between nodes.
/// Points outside the sampled range evaluate to zero.
StateVec sample_profile(const Profile& profile, double x);

}  // namespace chpattern
