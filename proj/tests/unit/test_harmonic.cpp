#include <doctest.h>

#include <cmath>
#include <random>

#include "harnacklab/builtins.hpp"
#include "harnacklab/harmonic.hpp"
#include "oracles.hpp"

using namespace harnack;

namespace {

ScalarField random_boundary(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = u(rng);
  return ScalarField(g, v, Role::auxiliary);
}

}  // namespace

TEST_CASE("constants are harmonic") {
  const Grid g(2, 33);
  const DomainMask m = mask_from_state(builtins::ball(g, 0.99));
  const HarmonicField f = solve_with_sphere_data(m, [](const Point&) { return 1.0; });
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (m.inside(i)) CHECK(f[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(residual(f) <= 1e-8);
}

TEST_CASE("half-ball with linear data reproduces the linear solution") {
  const Grid g(2, 65);
  const DomainMask m = mask_from_state(builtins::halfspace(g));
  const HarmonicField f = solve_with_sphere_data(m, [](const Point& x) { return std::max(x[1], 0.0); });
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(f[i] - std::max(g.coords(i)[1], 0.0)) <= 1e-8);
}

TEST_CASE("iterative matches dense on random data") {
  std::mt19937_64 rng(3);
  const Grid g(2, 17);
  const DomainMask m = mask_from_state(builtins::ball(g, 0.9));
  const ScalarField data = random_boundary(g, rng);
  SolverSettings st;
  st.tol = 1e-12;
  const HarmonicField f = solve({m, data, st});
  const auto ref = oracle::dense_dirichlet(m, data);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(f[i] - ref[i]) <= 1e-10);
}

TEST_CASE("iterative matches dense in 3D") {
  std::mt19937_64 rng(4);
  const Grid g(3, 9);
  const DomainMask m = mask_from_state(builtins::ball(g, 0.8));
  const ScalarField data = random_boundary(g, rng);
  SolverSettings st;
  st.tol = 1e-12;
  const HarmonicField f = solve({m, data, st});
  const auto ref = oracle::dense_dirichlet(m, data);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(f[i] - ref[i]) <= 1e-10);
}

TEST_CASE("residual is recomputed and respects the tolerance") {
  std::mt19937_64 rng(8);
  const Grid g(2, 33);
  const DomainMask m = mask_from_state(builtins::two_bump(g));
  const HarmonicField f = solve({m, random_boundary(g, rng), {}});
  CHECK(residual(f) <= 1e-8);
  CHECK(residual(f) == doctest::Approx(f.residual()).epsilon(1e-6).scale(1e-8));
}

TEST_CASE("non-convergence reports the last residual") {
  std::mt19937_64 rng(9);
  const Grid g(2, 65);
  SolverSettings st;
  st.max_sweeps = 8;
  st.tol = 1e-14;
  try {
    solve({mask_from_state(builtins::ball(g, 0.9)), random_boundary(g, rng), st});
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.last_residual() > 1e-14);
  }
}

TEST_CASE("maximum principle and linearity") {
  std::mt19937_64 rng(10);
  const Grid g(2, 33);
  const DomainMask m = mask_from_state(builtins::two_bump(g));
  const ScalarField d1 = random_boundary(g, rng), d2 = random_boundary(g, rng);
  SolverSettings st;
  st.tol = 1e-11;
  const HarmonicField f1 = solve({m, d1, st}), f2 = solve({m, d2, st});
  const double a = 0.7, b = 2.3;
  std::vector<double> mix(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) mix[i] = a * d1[i] + b * d2[i];
  const HarmonicField f = solve({m, ScalarField(g, mix, Role::auxiliary), st});
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.inside(i)) {
      lo = std::min(lo, d1[i]);
      hi = std::max(hi, d1[i]);
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f1[i] >= lo);
    CHECK(f1[i] <= hi);
    // error per solve is bounded by the residual times the Green's function of B_1 (< 1/4)
    CHECK(std::abs(f[i] - a * f1[i] - b * f2[i]) <= 2 * st.tol);
  }
}

TEST_CASE("mean value check") {
  const Grid g(2, 65);
  const DomainMask m = mask_from_state(builtins::ball(g, 1.0));
  const HarmonicField one = solve_with_sphere_data(m, [](const Point&) { return 1.0; });
  CHECK(mean_value_check(one, g.origin(), 0.3) <= 1e-9);
  SolverSettings st;
  st.tol = 1e-11;
  const HarmonicField lin = solve_with_sphere_data(m, [](const Point& x) { return 1.0 + x[0]; }, st);
  CHECK(mean_value_check(lin, *g.nearest_node({0.2, -0.1, 0.0}), 0.25) <= g.h());
  CHECK_THROWS_AS(mean_value_check(lin, g.origin(), 1.2), Error);
}

TEST_CASE("mean value defect shrinks like h^2") {
  for (int n : {33, 65, 129}) {
    const Grid g(2, n);
    const DomainMask m = mask_from_state(builtins::ball(g, 0.99));
    SolverSettings st;
    st.tol = 1e-10;
    const HarmonicField f = solve_with_sphere_data(
        m, [](const Point& x) { return 2.0 + std::cos(3.0 * std::atan2(x[1], x[0])); }, st);
    for (const Point c : {Point{0.0, 0.0, 0.0}, Point{0.25, 0.25, 0.0}, Point{-0.3, 0.1, 0.0}}) {
      CHECK(mean_value_check(f, *g.nearest_node(c), 0.3) <= 5 * g.h() * g.h() * f.field().max_value());
    }
  }
}

TEST_CASE("interior Harnack constant is stable across resolutions") {
  std::vector<double> ratios;
  for (int n : {65, 129}) {
    const Grid g(2, n);
    const DomainMask m = mask_from_state(builtins::ball(g, 0.99));
    const HarmonicField f =
        solve_with_sphere_data(m, [](const Point& x) { return std::exp(2.0 * x[0]); });
    double lo = INFINITY, hi = 0.0;
    g.for_each_in_ball({0.0, 0.0, 0.0}, 0.25, [&](std::size_t i) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    });
    ratios.push_back(hi / lo);
  }
  CHECK(ratios[0] == doctest::Approx(ratios[1]).epsilon(0.05));
}
