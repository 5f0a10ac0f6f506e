// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "chpattern/shoot.hpp"

using namespace chpattern;

namespace {

const ProblemParams kP3{1, 3.0};
// p = 3 even ground state located by a default scan
const FarFieldParams kGroundSeed{5.0, 7.48};

const ShootResult& ground_state() {
  static const ShootResult r = solve_profile(kP3, Symmetry::Even, kGroundSeed, ShootSettings{});
  return r;
}

double rel_diff(const ResidualPair& a, const ResidualPair& b) {
  const double scale = std::max(a.inf_norm(), b.inf_norm());
  return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second)) / scale;
}

ResidualPair negate(const ResidualPair& r) { return {-r.first, -r.second}; }

// Profile sampled from the closed-form far-field mode on [0, R].
Profile mode_profile(double k1, double k2, double R, double h) {
  Profile p;
  p.params = kP3;
  p.source = FarFieldParams{k1, k2};
  const int n = static_cast<int>(std::lround(R / h)) + 1;
  for (int i = 0; i < n; ++i) {
    const double r = i * h;
    const StateVec y = farfield_closed_form(kP3, {k1, k2}, r);
    p.grid.push_back(r);
    p.u.push_back(y[0]);
    p.u1.push_back(y[1]);
    p.u2.push_back(y[2]);
    p.u3.push_back(y[3]);
  }
  return p;
}

ShootResult synthetic(FarFieldParams ff, double amp, double freq, double defect) {
  ShootResult r;
  r.ff = ff;
  r.origin_defect = defect;
  r.converged = true;
  r.profile = mode_profile(1.0, 0.0, 10.0, 0.1);
  for (std::size_t i = 0; i < r.profile.size(); ++i)
    r.profile.u[i] = amp * std::cos(freq * r.profile.grid[i]) * std::exp(-r.profile.grid[i]);
  return r;
}

}  // namespace

TEST_CASE("newton2d on closed-form maps") {
  SUBCASE("identity map converges in one step") {
    const ResidualMap id = [](const FarFieldParams& k) { return ResidualPair{k.k1, k.k2}; };
    const NewtonResult r = newton2d(id, {0.3, -0.2}, NewtonOptions{});
    CHECK(r.converged());
    CHECK(r.iters == 1);
    CHECK(std::abs(r.root.k1) <= 1e-10);
    CHECK(std::abs(r.root.k2) <= 1e-10);
  }
  SUBCASE("coupled quadratic converges to (1, 1)") {
    const ResidualMap f = [](const FarFieldParams& k) {
      return ResidualPair{k.k1 * k.k1 - k.k2, k.k2 * k.k2 - k.k1};
    };
    const NewtonResult r = newton2d(f, {1.2, 0.9}, NewtonOptions{});
    REQUIRE(r.converged());
    CHECK(r.root.k1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.root.k2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.residual.inf_norm() <= 1e-10);

    NewtonOptions one;
    one.max_iters = 1;
    CHECK(newton2d(f, {1.2, 0.9}, one).status == NewtonStatus::NotConverged);
  }
  SUBCASE("singular Jacobian") {
    const ResidualMap f = [](const FarFieldParams& k) {
      return ResidualPair{k.k1 + k.k2, k.k1 + k.k2};
    };
    CHECK(newton2d(f, {1.0, 1.0}, NewtonOptions{}).status == NewtonStatus::SingularJacobian);
  }
  SUBCASE("non-finite seed") {
    const ResidualMap f = [](const FarFieldParams&) { return ResidualPair::non_finite(); };
    CHECK(newton2d(f, {1.0, 1.0}, NewtonOptions{}).status == NewtonStatus::NonFiniteSeed);
  }
  SUBCASE("a seed already at the root takes no step") {
    const ResidualMap id = [](const FarFieldParams& k) { return ResidualPair{k.k1, k.k2}; };
    const NewtonResult r = newton2d(id, {0.0, 0.0}, NewtonOptions{});
    CHECK(r.converged());
    CHECK(r.iters == 0);
  }
}

TEST_CASE("shooting map examples") {
  const IntegratorConfig cfg;
  SUBCASE("zero amplitude gives a zero residual") {
    for (Symmetry s : {Symmetry::Even, Symmetry::Odd}) {
      const ResidualPair r = shooting_map(kP3, s, {0.0, 1.0}, 25.0, cfg);
      CHECK(r.first == 0.0);
      CHECK(r.second == 0.0);
    }
  }
  SUBCASE("small amplitude reproduces the linear mode at the origin") {
    // The mode e^{-r/√2}cos(r/√2) solves u'''' = -u exactly; at r = 0 its
    // state is (1, -1/√2, 0, 1/√2).
    const double k1 = 1e-8, s = 1.0 / std::sqrt(2.0);
    const ResidualPair even = shooting_map(kP3, Symmetry::Even, {k1, 0.0}, 20.0, cfg);
    CHECK(std::abs(even.first + k1 * s) <= 1e-14);
    CHECK(std::abs(even.second - k1 * s) <= 1e-14);
    const ResidualPair odd = shooting_map(kP3, Symmetry::Odd, {k1, 0.0}, 20.0, cfg);
    CHECK(std::abs(odd.first - k1) <= 1e-14);
    CHECK(std::abs(odd.second) <= 1e-14);
  }
  SUBCASE("small amplitudes scale linearly") {
    const ResidualPair base = shooting_map(kP3, Symmetry::Even, {1e-7, 0.8}, 20.0, cfg);
    for (double c : {3.0, 10.0}) {
      const ResidualPair r = shooting_map(kP3, Symmetry::Even, {c * 1e-7, 0.8}, 20.0, cfg);
      CHECK(std::abs(r.first - c * base.first) <= 1e-6 * std::abs(c * base.first));
      CHECK(std::abs(r.second - c * base.second) <= 1e-6 * std::abs(c * base.second));
    }
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(shooting_map({2, 3.0}, Symmetry::Odd, {1.0, 0.0}, 25.0, cfg), DomainError);
    CHECK_THROWS_AS(shooting_map(kP3, Symmetry::Forward, {1.0, 0.0}, 25.0, cfg), DomainError);
    CHECK_THROWS_AS(shooting_map(kP3, Symmetry::Even, {1.0, 0.0}, 0.0, cfg), DomainError);
    CHECK_NOTHROW(shooting_map({2, 3.0}, Symmetry::Even, {1e-3, 0.0}, 25.0, cfg));
  }
}

TEST_CASE("shooting map symmetries") {
  const IntegratorConfig cfg;
  for (Symmetry s : {Symmetry::Even, Symmetry::Odd}) {
    for (const FarFieldParams ff : {FarFieldParams{0.7, 0.3}, FarFieldParams{4.0, 2.1}}) {
      CAPTURE(to_string(s));
      const ResidualPair base = shooting_map(kP3, s, ff, 25.0, cfg);
      const ResidualPair period = shooting_map(kP3, s, {ff.k1, ff.k2 + kPhasePeriod}, 25.0, cfg);
      const ResidualPair half = shooting_map(kP3, s, {ff.k1, ff.k2 + 0.5 * kPhasePeriod}, 25.0, cfg);
      const ResidualPair flip = shooting_map(kP3, s, {-ff.k1, ff.k2}, 25.0, cfg);
      CHECK(rel_diff(period, base) <= 1e-8);
      CHECK(rel_diff(half, negate(base)) <= 1e-8);
      CHECK(rel_diff(flip, negate(base)) <= 1e-8);
    }
  }
}

TEST_CASE("solve_profile finds the p = 3 even ground state") {
  const ShootResult& r = ground_state();
  REQUIRE(r.converged);
  CHECK(r.status == NewtonStatus::Converged);
  CHECK(r.residual.inf_norm() <= 1e-8);
  CHECK(r.origin_defect == r.residual.sum_squares());
  const Profile& p = r.profile;
  CHECK(p.status == TrajectoryStatus::Completed);
  CHECK(p.grid.front() == 0.0);
  CHECK(p.grid.back() == doctest::Approx(25.0));
  for (std::size_t i = 1; i < p.size(); ++i) REQUIRE(p.grid[i] > p.grid[i - 1]);
  // single dominant extremum at the origin
  CHECK(std::abs(p.u.front()) == doctest::Approx(p.sup_norm()));
  const double bound = 1e-5 * (1.0 + std::pow(p.sup_norm(), kP3.p));
  CHECK(p.ode_residual_max <= bound);
  CHECK(p.ode_residual_max == ode_residual(p));
  CHECK(std::abs(tail_decay_rate(p) + 1.0 / std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("even profile is reflection symmetric") {
  // Integrating the stored origin state to r = -10 must reproduce u(10).
  const Profile& p = ground_state().profile;
  const auto rhs = [](double r, const StateVec& y) { return eval_rhs(kP3, r, y); };
  const std::vector<double> end{-10.0};
  const Trajectory t = integrate(rhs, p.state(0), 0.0, -10.0, end, IntegratorConfig{});
  REQUIRE(t.completed());
  const StateVec at10 = sample_profile(p, 10.0);
  CHECK(std::abs(t.final_state[0] - at10[0]) <= 1e-6);
  CHECK(std::abs(t.final_state[1] + at10[1]) <= 1e-6);
}

TEST_CASE("tail decay rate of the exact mode") {
  const Profile m = mode_profile(2.0, 1.3, 30.0, 0.01);
  CHECK(std::abs(tail_decay_rate(m) + 1.0 / std::sqrt(2.0)) <= 1e-9);
  Profile zero = m;
  std::fill(zero.u.begin(), zero.u.end(), 0.0);
  std::fill(zero.u1.begin(), zero.u1.end(), 0.0);
  CHECK_THROWS_AS(tail_decay_rate(zero), DomainError);
}

TEST_CASE("ode residual of the small-amplitude mode is at rounding level") {
  const Profile m = mode_profile(1e-6, 0.4, 20.0, 0.01);
  const std::vector<double> series = ode_residual_series(m);
  REQUIRE(series.size() == m.size());
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2}, m.size() - 1})
    CHECK(series[i] == 0.0);
  CHECK(ode_residual(m) <= 1e-14);
}

TEST_CASE("scan seeds") {
  ScanRequest req;
  req.k1_range = {1e-2, 1.0};
  req.counts = {3, 4};
  const std::vector<FarFieldParams> s = scan_seeds(req);
  REQUIRE(s.size() == 12);
  CHECK(s[0].k1 == doctest::Approx(1e-2));
  CHECK(s[4].k1 == doctest::Approx(1e-1));
  CHECK(s[8].k1 == doctest::Approx(1.0));
  for (int j = 0; j < 4; ++j) CHECK(s[j].k2 == doctest::Approx(j * kPhasePeriod / 4));

  ScanRequest bad = req;
  bad.counts = {0, 4};
  CHECK_THROWS_AS(scan_seeds(bad), DomainError);
  bad = req;
  bad.k1_range = {0.0, 1.0};
  CHECK_THROWS_AS(scan_seeds(bad), DomainError);
  bad = req;
  bad.k2_range = {1.0, 0.0};
  CHECK_THROWS_AS(scan_seeds(bad), DomainError);
}

TEST_CASE("scan from a zero seed finds nothing") {
  ScanRequest req;
  req.k1_range = {0.0, 0.0};
  req.counts = {1, 1};
  CHECK(scan(kP3, Symmetry::Even, req, ShootSettings{}).empty());
}

TEST_CASE("scan is deterministic across thread counts") {
  ScanRequest req;
  req.k1_range = {2.0, 8.0};
  req.counts = {2, 3};
  const auto a = scan(kP3, Symmetry::Even, req, ShootSettings{});
  req.threads = 3;
  const auto b = scan(kP3, Symmetry::Even, req, ShootSettings{});
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ff.k1 == b[i].ff.k1);
    CHECK(a[i].ff.k2 == b[i].ff.k2);
    CHECK(a[i].profile.u == b[i].profile.u);
  }
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].profile.sup_norm() <= a[i].profile.sup_norm());
}

TEST_CASE("profile distance") {
  const ShootResult a = synthetic({1.0, 0.0}, 1.0, 1.0, 0.0);
  ShootResult neg = a;
  for (double& x : neg.profile.u) x = -x;
  CHECK(profile_distance(a.profile, a.profile) == 0.0);
  CHECK(profile_distance(a.profile, neg.profile) == 0.0);
  CHECK(profile_distance(a.profile, synthetic({1.0, 0.0}, 1.0, 2.0, 0.0).profile) > 0.1);
  Profile shorter = a.profile;
  shorter.u.pop_back();
  shorter.grid.pop_back();
  CHECK(profile_distance(a.profile, shorter) == std::numeric_limits<double>::infinity());
}

TEST_CASE("dedupe") {
  const ShootResult a = synthetic({1.0, 0.0}, 1.0, 1.0, 1e-20);
  SUBCASE("identical profiles keep the smaller defect") {
    ShootResult b = synthetic({3.0, 2.0}, 1.0, 1.0, 1e-24);
    const auto out = dedupe({a, b});
    REQUIRE(out.size() == 1);
    CHECK(out[0].origin_defect == 1e-24);
  }
  SUBCASE("negated profile") {
    CHECK(dedupe({a, synthetic({3.0, 2.0}, -1.0, 1.0, 0.0)}).size() == 1);
  }
  SUBCASE("far-field parameters related by the exact symmetries") {
    const double half = 0.5 * kPhasePeriod;
    CHECK(dedupe({a, synthetic({1.0, half}, 1.0, 3.0, 0.0)}).size() == 1);
    CHECK(dedupe({a, synthetic({-1.0, 0.0}, 1.0, 3.0, 0.0)}).size() == 1);
    CHECK(dedupe({a, synthetic({-1.0, half}, 1.0, 3.0, 0.0)}).size() == 1);
    CHECK(dedupe({a, synthetic({1.0, kPhasePeriod}, 1.0, 3.0, 0.0)}).size() == 1);
  }
  SUBCASE("distinct profiles survive") {
    CHECK(dedupe({a, synthetic({1.5, 0.3}, 1.0, 3.0, 0.0)}).size() == 2);
    CHECK(dedupe({}).empty());
  }
}

TEST_CASE("forward profile") {
  const IntegratorConfig cfg;
  SUBCASE("zero origin value stays zero") {
    const Profile p = forward_profile(kP3, 0.0, 10.0, cfg);
    CHECK(p.sup_norm() == 0.0);
    CHECK(p.grid.back() == doctest::Approx(10.0));
    CHECK(p.symmetry == Symmetry::Forward);
  }
  SUBCASE("stored data are even at the origin") {
    const Profile p = forward_profile(kP3, 1.5, 20.0, cfg);
    CHECK(p.u.front() == 1.5);
    CHECK(p.u1.front() == 0.0);
    CHECK(p.u3.front() == 0.0);
    CHECK(std::get<double>(p.source) == 1.5);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(forward_profile({2, 3.0}, 1.0, 10.0, cfg), DomainError);
    CHECK_THROWS_AS(forward_profile(kP3, 1.0, 0.0, cfg), DomainError);
    CHECK_THROWS_AS(forward_profile(kP3, 1.0, 10.0, cfg, 0.0), DomainError);
  }
}

TEST_CASE("solve_profile rejects invalid requests") {
  CHECK_THROWS_AS(solve_profile({2, 3.0}, Symmetry::Odd, {1.0, 0.0}, ShootSettings{}), DomainError);
  CHECK_THROWS_AS(solve_profile(kP3, Symmetry::Forward, {1.0, 0.0}, ShootSettings{}), DomainError);
}

TEST_CASE("p = 2 residual is not polluted by the jump of u'''' at zeros of u") {
  // u'''' jumps by 4u'^2 where u changes sign, so a centred stencil across a
  // zero would report O(1) residuals for an accurate solution.
  const ProblemParams p2{1, 2.0};
  for (const auto& [sym, seed] : {std::pair{Symmetry::Even, FarFieldParams{17.86, 6.555}},
                                  std::pair{Symmetry::Odd, FarFieldParams{20.28, 8.666}}}) {
    const ShootResult r = solve_profile(p2, sym, seed, ShootSettings{});
    REQUIRE(r.converged);
    CAPTURE(to_string(sym));
    const double bound = 1e-5 * (1.0 + std::pow(r.profile.sup_norm(), p2.p));
    CHECK(r.profile.ode_residual_max <= bound);
    CHECK(pattern_stats(r.profile).nodes.count > 0);
  }
}
