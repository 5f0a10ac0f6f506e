// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "chpattern/shoot.hpp"

namespace chpattern {

const char* to_string(PatternClass c) {
  switch (c) {
    case PatternClass::Periodic: return "periodic";
    case PatternClass::Transitional: return "transitional";
    case PatternClass::Chaotic: return "chaotic";
    case PatternClass::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

SpacingStats spacing_stats(const std::vector<double>& positions) {
  SpacingStats s;
  s.count = positions.size();
  if (positions.size() < 3) return s;
  const std::size_t m = positions.size() - 1;
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) mean += positions[i + 1] - positions[i];
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = positions[i + 1] - positions[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(m);
  s.mean = mean;
  s.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  return s;
}

PatternClass classify_cv(double cv, std::size_t n_events) {
  if (n_events < kMinPatternEvents) return PatternClass::Indeterminate;
  if (cv < kPeriodicCv) return PatternClass::Periodic;
  if (cv > kChaoticCv) return PatternClass::Chaotic;
  return PatternClass::Transitional;
}

std::vector<double> sign_change_positions(const std::vector<double>& grid,
                                          const std::vector<double>& values) {
  std::vector<double> roots;
  const std::size_t n = values.size();
  if (n < 3 || grid.size() != n) return roots;

  // Zero samples are skipped; a crossing is registered between the last
  // nonzero sample and the next one of opposite sign.
  std::size_t last = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] == 0.0) continue;
    if (last != n && (values[last] > 0.0) != (values[i] > 0.0)) {
      if (i != last + 1) {
        roots.push_back(0.5 * (grid[last] + grid[i]));
      } else {
        // quadratic through three neighbouring samples, root inside [x_last, x_i]
        const std::size_t lo = last == 0 ? 0 : std::min(last - 1, n - 3);
        const double x0 = grid[lo], x1 = grid[lo + 1], x2 = grid[lo + 2];
        const double f0 = values[lo], f1 = values[lo + 1], f2 = values[lo + 2];
        const double d01 = (f1 - f0) / (x1 - x0), d12 = (f2 - f1) / (x2 - x1);
        const double a = (d12 - d01) / (x2 - x0);
        const double xa = grid[last], xb = grid[i];
        const double fa = values[last], fb = values[i];
        double root = xa - fa * (xb - xa) / (fb - fa);  // linear fallback
        // f(x) = f0 + d01 (x - x0) + a (x - x0)(x - x1): Newton polish from the secant point
        for (int k = 0; k < 4; ++k) {
          const double fx = f0 + d01 * (root - x0) + a * (root - x0) * (root - x1);
          const double dfx = d01 + a * (2.0 * root - x0 - x1);
          if (dfx == 0.0) break;
          const double next = root - fx / dfx;
          if (!(next >= xa && next <= xb) && !(next <= xa && next >= xb)) break;
          root = next;
        }
        roots.push_back(root);
      }
    }
    last = i;
  }
  return roots;
}

PatternStats pattern_stats(const Profile& profile) {
  PatternStats st;
  const std::vector<double> extrema = sign_change_positions(profile.grid, profile.u1);
  const std::vector<double> nodes = sign_change_positions(profile.grid, profile.u);
  st.n_extrema = extrema.size();
  st.extrema = spacing_stats(extrema);
  st.nodes = spacing_stats(nodes);
  st.spacing_mean = st.nodes.mean;
  st.spacing_cv = st.nodes.cv;
  st.classification = classify_cv(st.spacing_cv, st.nodes.count);
  return st;
}

}  // namespace chpattern
