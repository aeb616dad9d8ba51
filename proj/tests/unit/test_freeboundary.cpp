#include <doctest.h>

#include <cmath>

#include "harnacklab/builtins.hpp"
#include "harnacklab/corpus.hpp"
#include "harnacklab/freeboundary.hpp"
#include "oracles.hpp"

using namespace harnack;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

FbProblem problem(const Grid& g, std::vector<std::function<double(const Point&)>> fs, double Lambda = 1.0) {
  std::vector<ScalarField> comps;
  for (auto& f : fs) comps.push_back(oracle::field_from(g, f));
  return {Lambda, VectorField(std::move(comps)), {}};
}

double theta(const Point& x) { return std::atan2(x[1], x[0]); }

// positive on an arc of the sphere, zero elsewhere
double arc(const Point& x) { return std::max(std::sin(theta(x)) - 0.2, 0.0); }

std::size_t support_size(const ScalarField& phi) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) n += phi[i] > 0.0 ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("planar data gives the planar minimizer") {
  const Grid g(2, 65);
  const FbSolution sol = minimize(problem(g, {[](const Point& x) { return std::max(x[1], 0.0); }}));
  const ScalarField planar = builtins::halfspace(g);
  CHECK(sol.converged);
  CHECK(max_diff(sol.phi, planar) <= 2.0 * g.h());
  const ScalarField candidate = oracle::field_from(g, [](const Point& x) { return std::max(x[1], 0.0); });
  CHECK(fb_energy(sol.U, 1.0) <= fb_energy(candidate, 1.0));
  CHECK(sol.energy_history.back() == doctest::Approx(fb_energy(sol.U, 1.0)).epsilon(1e-9));
}

TEST_CASE("energy history is nonincreasing") {
  const Grid g(2, 65);
  const FbSolution sol = minimize(problem(g, {arc}));
  REQUIRE(sol.energy_history.size() >= 1);
  for (std::size_t k = 1; k < sol.energy_history.size(); ++k)
    CHECK(sol.energy_history[k] <= sol.energy_history[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("collinear vector data reduces to the scalar problem") {
  const Grid g(2, 65);
  const double a = 1.0, b = 0.3;
  const FbSolution vec = minimize(problem(g, {[&](const Point& x) { return a * arc(x); },
                                              [&](const Point& x) { return b * arc(x); }}));
  const double s = std::sqrt(a * a + b * b);
  const FbSolution sc = minimize(problem(g, {[&](const Point& x) { return s * arc(x); }}));
  CHECK(max_diff(vec.phi, sc.phi) <= 1e-6);
  CHECK(support_size(vec.phi) == support_size(sc.phi));
  // components stay proportional
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(vec.U[1][i] == doctest::Approx(b / a * vec.U[0][i]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("larger Lambda shrinks the support") {
  const Grid g(2, 65);
  std::size_t prev = g.size() + 1;
  for (double Lambda : {0.25, 1.0, 4.0}) {
    const FbSolution sol = minimize(problem(g, {[](const Point& x) { return 1.0 + 0.5 * std::cos(theta(x)); }}, Lambda));
    const std::size_t n = support_size(sol.phi);
    CHECK(n <= prev);
    prev = n;
  }
  CHECK(prev > 0);
}

TEST_CASE("minimize preconditions") {
  const Grid g(2, 33);
  CHECK_THROWS_WITH_AS(minimize(problem(g, {[](const Point&) { return 0.0; }})), doctest::Contains("vanish identically"),
                       Error);
  CHECK_THROWS_WITH_AS(minimize(problem(g, {arc}, 0.0)), doctest::Contains("Lambda must be positive"), Error);
}

TEST_CASE("coarse-to-fine ladder") {
  CHECK(fb_levels(257, 33) == std::vector<int>{33, 65, 129, 257});
  CHECK(fb_levels(129, 33) == std::vector<int>{33, 65, 129});
  CHECK(fb_levels(33, 33) == std::vector<int>{33});
  CHECK(fb_levels(51, 33) == std::vector<int>{51});
}

TEST_CASE("energy of a linear field by hand") {
  // u = x_2 everywhere: each edge along axis 1 contributes h^2 (slope 1), plus Lambda h^2 per positive node
  const Grid g(2, 9);
  const ScalarField u = oracle::field_from(g, [](const Point& x) { return std::max(x[1], 0.0); });
  const double h = g.h();
  double grad = 0.0, count = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.for_each_neighbor(i, [&](std::size_t j) {
      if (j < i) return;
      if (!g.in_unit_ball(i) && !g.in_unit_ball(j)) return;
      grad += (u[j] - u[i]) * (u[j] - u[i]);
    });
    if (g.in_unit_ball(i) && u[i] > 0.0) count += 1.0;
  }
  CHECK(fb_energy(u, 2.0) == doctest::Approx(grad + 2.0 * count * h * h).epsilon(1e-12));
}

TEST_CASE("modulus is controlled by the first component of the corpus") {
  const CorpusDomain& dom = fixture::corpus_domain(0);
  const VectorField& U = dom.raw.U;
  double C = 0.0;
  for (std::size_t i = 0; i < U.grid().size(); ++i) {
    if (dom.raw.phi[i] > 0.0) {
      REQUIRE(U[0][i] > 0.0);
      C = std::max(C, dom.raw.phi[i] / U[0][i]);
    }
  }
  CHECK(C < 10.0);
}

TEST_CASE("sub and super solution test") {
  const Grid g(2, 65);
  const FbSolution sol = minimize(problem(g, {arc}));
  const SubSuperResult same = sub_super_check(sol.phi, 1.0, 1.0, 24, 3);
  CHECK(same.pass);
  CHECK(same.upward_tested > 0);
  CHECK(same.downward_tested > 0);
  CHECK(sub_super_check(sol.phi, 0.5, 2.0, 24, 3).pass);
  CHECK_THROWS_AS(sub_super_check(sol.phi, 2.0, 1.0, 24, 3), Error);
  CHECK_THROWS_AS(sub_super_check(sol.phi, 0.0, 1.0, 24, 3), Error);
  CHECK_THROWS_AS(sub_super_check(sol.phi.with_role(Role::auxiliary), 1.0, 1.0, 24, 3), Error);
}

TEST_CASE("steep planar profile is not a minimizer") {
  const Grid g(2, 65);
  const SubSuperResult res = sub_super_check(builtins::halfspace(g, 10.0), 1.0, 1.0, 24, 3);
  CHECK_FALSE(res.pass);
  REQUIRE(res.certificate.has_value());
  CHECK(res.certificate->energy_v < res.certificate->energy_u);
  CHECK(res.certificate_field.has_value());
}

TEST_CASE("sub_super_check is deterministic") {
  const Grid g(2, 33);
  const auto a = sub_super_check(builtins::halfspace(g, 10.0), 1.0, 1.0, 12, 9);
  const auto b = sub_super_check(builtins::halfspace(g, 10.0), 1.0, 1.0, 12, 9);
  CHECK(a.pass == b.pass);
  REQUIRE(a.certificate.has_value() == b.certificate.has_value());
  if (a.certificate) CHECK(a.certificate->energy_v == b.certificate->energy_v);
}
