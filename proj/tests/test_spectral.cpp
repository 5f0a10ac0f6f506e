// Copyright the chpattern authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "chpattern/spectral.hpp"

using namespace chpattern;

namespace {

Eigen::MatrixXd dense(const SymTridiagonal& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = t.diag[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = t.off[i];
  }
  return m;
}

SymTridiagonal random_tridiagonal(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SymTridiagonal t;
  for (std::size_t i = 0; i < n; ++i) t.diag.push_back(3.0 * dist(gen));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off.push_back(dist(gen));
  return t;
}

// Exact Dirichlet eigenvalues of the 3-point -Δ with m intervals of size h.
std::vector<double> smallest_lambda_exact(int m, double h, std::size_t k) {
  std::vector<double> lam;
  for (int j = 1; j < m; ++j) {
    const double s = std::sin(kPi * j / (2.0 * m));
    const double d = 4.0 / (h * h) * s * s;
    lam.push_back(d + 1.0 / d);
  }
  std::sort(lam.begin(), lam.end());
  lam.resize(k);
  return lam;
}

// Dense oracle for (D + D^{-1}) ψ = λ diag(w) ψ.
Eigen::VectorXd generalized_oracle(const SymTridiagonal& lap, const std::vector<double>& w) {
  const Eigen::MatrixXd d = dense(lap);
  const Eigen::MatrixXd a = d + d.inverse();
  Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) wv[static_cast<Eigen::Index>(i)] = w[i];
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::MatrixXd(wv.asDiagonal()));
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("two-node fixture") {
  const GridSpec g{1.5, 1.0, 1, 0.0};
  const SymTridiagonal lap = assemble_lap(g);
  CHECK(lap.diag == std::vector<double>{2.0, 2.0});
  CHECK(lap.off == std::vector<double>{-1.0});
  for (const SpectrumReport& r : {spectrum_L(g, 2), spectrum_of(lap, 2)}) {
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(r.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
    CHECK(r.d_values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.d_values[1] == doctest::Approx(3.0).epsilon(1e-14));
    for (double d : r.identity_defects) CHECK(d <= 1e-12);
  }
  const std::vector<double> flat{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  CHECK(rayleigh_quotient(g, flat) == doctest::Approx(2.0).epsilon(1e-14));
  const std::vector<double> l_flat = apply_nonlocal(lap, flat);
  CHECK(l_flat[0] == doctest::Approx(2.0 * flat[0]).epsilon(1e-14));
  CHECK(l_flat[1] == doctest::Approx(2.0 * flat[1]).epsilon(1e-14));
}

TEST_CASE("grid assembly") {
  SUBCASE("line") {
    const GridSpec g{2.0, 0.5, 1, 0.0};
    CHECK(g.intervals() == 8);
    CHECK(g.interior_size() == 7);
    const std::vector<double> x = g.nodes();
    CHECK(x.front() == doctest::Approx(-1.5));
    CHECK(x.back() == doctest::Approx(1.5));
    const SymTridiagonal lap = assemble_lap(g);
    for (double d : lap.diag) CHECK(d == doctest::Approx(8.0));
    for (double o : lap.off) CHECK(o == doctest::Approx(-4.0));
  }
  SUBCASE("radial N = 3 has no potential term") {
    const SymTridiagonal a = assemble_lap({2.0, 0.1, 3, 0.0});
    const SymTridiagonal b = assemble_lap({1.0, 0.1, 1, 0.0});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.diag[i] == doctest::Approx(b.diag[i]));
  }
  SUBCASE("radial N = 2 adds -1/(4r²)") {
    const GridSpec g{2.0, 0.1, 2, 0.5};
    const SymTridiagonal lap = assemble_lap(g);
    const std::vector<double> r = g.nodes();
    CHECK(r.front() == doctest::Approx(0.6));
    for (std::size_t i = 0; i < r.size(); ++i)
      CHECK(lap.diag[i] == doctest::Approx(200.0 - 0.25 / (r[i] * r[i])));
  }
  SUBCASE("invalid grids") {
    CHECK_THROWS_AS(GridSpec({1.0, 0.0, 1, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec({1.0, 0.3, 1, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec({1.0, 1.0, 1, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec({1.0, 0.1, 0, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec({1.0, 0.1, 3, -0.1}).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec({-1.0, 0.1, 1, 0.0}).validate(), DomainError);
  }
}

TEST_CASE("tridiagonal eigenvalues against a dense solver") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const SymTridiagonal t = random_tridiagonal(60, seed);
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(t)).eigenvalues();
    const double scale = t.norm_inf();
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(std::abs(t.eigenvalue(k) - ref[static_cast<Eigen::Index>(k)]) <= 1e-13 * scale);
      CHECK(t.count_below(ref[static_cast<Eigen::Index>(k)] + 1e-9) == k + 1);
    }
    const double lam = t.eigenvalue(7);
    const EigenVectorResult ev = inverse_iteration(t, lam, {}, 11);
    CHECK(ev.residual <= 1e-10 * scale);
    double norm = 0.0;
    for (double x : ev.vector) norm += x * x;
    CHECK(norm == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(random_tridiagonal(5, 1).eigenvalue(5), DomainError);
}

TEST_CASE("linear solves against a dense solver") {
  const SymTridiagonal t = random_tridiagonal(40, 7);
  std::vector<double> b(40);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::cos(0.3 * static_cast<double>(i));
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), 40);
  const Eigen::MatrixXd shifted = dense(t) - 0.37 * Eigen::MatrixXd::Identity(40, 40);
  const Eigen::VectorXd ref = shifted.fullPivLu().solve(bv);
  const std::vector<double> x = t.solve_shifted(0.37, b);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(x[i] - ref[static_cast<Eigen::Index>(i)]) <= 1e-10 * ref.cwiseAbs().maxCoeff());
  const std::vector<double> wrong(3, 1.0);
  CHECK_THROWS_AS(t.solve(wrong), DomainError);

  // banded SPD: pentadiagonal D² + I from a Laplacian
  const SymTridiagonal lap = assemble_lap({2.0, 0.1, 1, 0.0});
  const Eigen::MatrixXd dd = dense(lap);
  const Eigen::MatrixXd m = dd * dd + Eigen::MatrixXd::Identity(dd.rows(), dd.cols());
  const std::size_t n = lap.size();
  BandedSpd band(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= i; ++j)
      band.at(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  CHECK_THROWS_AS(band.solve(std::vector<double>(n, 1.0)), DomainError);
  CHECK_THROWS_AS(band.at(0, 1), DomainError);
  band.factorize();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(0.2 * static_cast<double>(i)) + 0.1;
  const Eigen::VectorXd ref2 = m.llt().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(n)));
  const std::vector<double> y = band.solve(rhs);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(y[i] - ref2[static_cast<Eigen::Index>(i)]) <= 1e-10 * ref2.cwiseAbs().maxCoeff());

  BandedSpd indefinite(2, 1);
  indefinite.at(0, 0) = 1.0;
  indefinite.at(1, 1) = 1.0;
  indefinite.at(1, 0) = 2.0;
  CHECK_THROWS_AS(indefinite.factorize(), DomainError);
}

TEST_CASE("spectrum of the non-local operator on [-30, 30]") {
  const GridSpec g{30.0, 0.05, 1, 0.0};
  const SpectrumReport r = spectrum_L(g, 5);
  REQUIRE(r.eigenvalues.size() == 5);
  CHECK(r.eigenvalues[0] >= 1.9999);
  CHECK(r.eigenvalues[0] <= 2.01);
  const std::vector<double> exact = smallest_lambda_exact(1200, 0.05, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r.eigenvalues[i] >= 2.0);
    CHECK(r.eigenvalues[i] == doctest::Approx(exact[i]).epsilon(1e-12));
    CHECK(r.eigenvalues[i] == doctest::Approx(r.d_values[i] + 1.0 / r.d_values[i]).epsilon(1e-14));
    CHECK(r.identity_defects[i] <= 1e-8);
    if (i > 0) CHECK(r.eigenvalues[i] >= r.eigenvalues[i - 1]);
  }
  // eigenvector Rayleigh quotient equals the eigenvalue
  CHECK(rayleigh_quotient(g, r.vectors[0]) == doctest::Approx(r.eigenvalues[0]).epsilon(1e-10));
}

TEST_CASE("smallest eigenvalue is non-increasing in the box size") {
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {5.0, 10.0, 20.0, 40.0}) {
    const double l1 = spectrum_L({L, 0.05, 1, 0.0}, 1).eigenvalues[0];
    CAPTURE(L);
    CHECK(l1 <= prev + 1e-12);
    CHECK(l1 >= 2.0);
    prev = l1;
  }
}

TEST_CASE("Rayleigh quotients bound the smallest eigenvalue") {
  const GridSpec g{5.0, 0.1, 1, 0.0};
  const double l1 = spectrum_L(g, 1).eigenvalues[0];
  std::mt19937 gen(2024);
  std::normal_distribution<double> dist;
  std::vector<double> v(g.interior_size());
  for (int trial = 0; trial < 100; ++trial) {
    for (double& x : v) x = dist(gen);
    CHECK(rayleigh_quotient(g, v) >= l1 - 1e-10);
  }
  std::fill(v.begin(), v.end(), 0.0);
  CHECK_THROWS_AS(rayleigh_quotient(g, v), DomainError);
  CHECK_THROWS_AS(rayleigh_quotient(g, std::vector<double>(3, 1.0)), DomainError);
}

TEST_CASE("weighted spectrum") {
  const GridSpec g{5.0, 0.1, 1, 0.0};
  const std::size_t n = g.interior_size();
  const SpectrumReport plain = spectrum_L(g, 4);

  SUBCASE("unit weight reproduces the plain spectrum") {
    const SpectrumReport w = weighted_spectrum(g, std::vector<double>(n, 1.0), 4);
    CHECK(w.weighted);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(w.eigenvalues[i] == doctest::Approx(plain.eigenvalues[i]).epsilon(1e-9));
  }
  SUBCASE("doubling the weight halves the eigenvalues") {
    const SpectrumReport w = weighted_spectrum(g, std::vector<double>(n, 2.0), 4);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(w.eigenvalues[i] == doctest::Approx(0.5 * plain.eigenvalues[i]).epsilon(1e-9));
  }
  SUBCASE("localized weight against a dense generalized solver") {
    const std::vector<double> x = g.nodes();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 3.0 / std::pow(std::cosh(x[i]), 2);
    const Eigen::VectorXd ref = generalized_oracle(assemble_lap(g), w);
    const SpectrumReport r = weighted_spectrum(g, w, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.eigenvalues[i] == doctest::Approx(ref[static_cast<Eigen::Index>(i)]).epsilon(1e-8));
      CHECK(r.identity_defects[i] <= 1e-8);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(weighted_spectrum(g, std::vector<double>(n, 0.0), 1), SingularWeight);
    std::vector<double> neg(n, 1.0);
    neg[3] = -0.1;
    CHECK_THROWS_AS(weighted_spectrum(g, neg, 1), DomainError);
    CHECK_THROWS_AS(weighted_spectrum(g, std::vector<double>(n - 1, 1.0), 1), DomainError);
    CHECK_THROWS_AS(weighted_spectrum(g, std::vector<double>(n, 1.0), 0), DomainError);
    CHECK_THROWS_AS(spectrum_L(g, n + 1), DomainError);
    CHECK_THROWS_AS(spectrum_L(g, 0), DomainError);
  }
}
