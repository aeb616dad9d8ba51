#include <doctest.h>

#include <cmath>
#include <numbers>

#include "harnacklab/acf.hpp"
#include "harnacklab/builtins.hpp"
#include "oracles.hpp"

using namespace harnack;

namespace {

constexpr double pi = std::numbers::pi;

struct Pair {
  ScalarField psi1, psi2;
};

Pair half_plane(const Grid& g) {
  return {oracle::field_from(g, [](const Point& x) { return std::max(x[1], 0.0); }),
          oracle::field_from(g, [](const Point& x) { return std::max(-x[1], 0.0); })};
}

Pair opposite_sectors(const Grid& g) {
  return {oracle::field_from(g, [](const Point& x) { return x[0] > 0 && x[1] > 0 ? 2 * x[0] * x[1] : 0.0; }),
          oracle::field_from(g, [](const Point& x) { return x[0] < 0 && x[1] < 0 ? 2 * x[0] * x[1] : 0.0; })};
}

}  // namespace

TEST_CASE("half-plane pair gives a constant profile") {
  const Grid g(2, 257);
  const Pair p = half_plane(g);
  const AcfProfile prof = acf_phi(p.psi1, p.psi2, geometric_radii(0.1, 0.9, 9));
  for (double v : prof.phi_values) CHECK(std::abs(v - pi * pi / 4) / (pi * pi / 4) <= 0.05);
  CHECK(prof.monotone_defect <= 0.02);
  for (double a : prof.alpha_values) {
    CHECK(a > 0.0);
    CHECK(a < 1.0);
  }
  CHECK(check_monotone(prof, 0.02).pass);
}

TEST_CASE("half-plane Dirichlet integral matches the half-disk area") {
  const Grid g(2, 257);
  const Pair p = half_plane(g);
  for (double r : {0.2, 0.5, 0.8}) CHECK(weighted_dirichlet(p.psi1, r) == doctest::Approx(pi * r * r / 2).epsilon(0.03));
}

TEST_CASE("half-plane profile converges under refinement") {
  const double r = 0.5;
  std::vector<double> err;
  for (int n : {65, 129, 257}) {
    const Pair p = half_plane(Grid(2, n));
    const AcfProfile prof = acf_phi(p.psi1, p.psi2, {0.3, r, 0.7});
    err.push_back(std::abs(prof.phi_values[1] - pi * pi / 4));
  }
  CHECK(err[1] <= err[0] + 1e-12);
  CHECK(err[2] <= err[1] + 1e-12);
}

TEST_CASE("zero second phase gives a zero profile") {
  const Grid g(2, 65);
  const Pair p = half_plane(g);
  const ScalarField zero = oracle::field_from(g, [](const Point&) { return 0.0; });
  const AcfProfile prof = acf_phi(p.psi1, zero, {0.2, 0.4, 0.6});
  for (double v : prof.phi_values) CHECK(v == 0.0);
  CHECK_THROWS_WITH_AS(check_monotone(prof, 0.02), doctest::Contains("degenerate profile"), Error);
}

TEST_CASE("profile scales with the fourth power") {
  const Grid g(2, 129);
  const Pair p = opposite_sectors(g);
  const std::vector<double> radii{0.2, 0.4, 0.8};
  const AcfProfile a = acf_phi(p.psi1, p.psi2, radii);
  const AcfProfile b = acf_phi(p.psi1.scaled(3.0), p.psi2.scaled(3.0), radii);
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(b.phi_values[k] == doctest::Approx(81.0 * a.phi_values[k]).epsilon(1e-12));
}

TEST_CASE("opposite sectors grow with the power-counting slope") {
  const Grid g(2, 257);
  const Pair p = opposite_sectors(g);
  const AcfProfile prof = acf_phi(p.psi1, p.psi2, geometric_radii(0.1, 0.9, 9));
  for (std::size_t k = 1; k < prof.phi_values.size(); ++k) CHECK(prof.phi_values[k] > prof.phi_values[k - 1]);
  const MonotoneVerdict v = check_monotone(prof, 0.02);
  CHECK(v.pass);
  // |grad psi|^2 ~ r^2 on each sector: each integral ~ r^4, the product ~ r^8, divided by r^4
  CHECK(std::abs(v.log_slope - 4.0) <= 0.15 * 4.0);
}

TEST_CASE("alpha is one where the sphere misses both supports") {
  const Grid g(2, 129);
  const ScalarField a = oracle::field_from(g, [](const Point& x) { return std::max(0.2 - std::hypot(x[0] - 0.3, x[1]), 0.0); });
  const ScalarField b = oracle::field_from(g, [](const Point& x) { return std::max(0.2 - std::hypot(x[0] + 0.3, x[1]), 0.0); });
  const AcfProfile prof = acf_phi(a, b, {0.2, 0.4, 0.8});
  CHECK(prof.alpha_values[2] == 1.0);
  CHECK(prof.alpha_values[1] < 1.0);
}

TEST_CASE("acf preconditions") {
  const Grid g(2, 65);
  const Pair p = half_plane(g);
  CHECK_THROWS_WITH_AS(acf_phi(p.psi1, p.psi1, {0.2, 0.4, 0.6}), doctest::Contains("overlap"), Error);
  CHECK_THROWS_WITH_AS(acf_phi(p.psi1, p.psi2, {2 * g.h(), 0.4, 0.6}), doctest::Contains("4h"), Error);
  const ScalarField shifted = oracle::field_from(g, [](const Point& x) { return std::max(x[1] + 0.1, 0.0); });
  const ScalarField below = oracle::field_from(g, [](const Point& x) { return std::max(-x[1] - 0.1, 0.0); });
  CHECK_THROWS_AS(acf_phi(shifted, below, {0.2, 0.4, 0.6}), Error);
}

TEST_CASE("truncation of the half-space") {
  const Grid g(2, 65);
  const ScalarField phi = builtins::halfspace(g);
  const double t = 0.25;
  const ScalarField tr = truncate_component(phi, t, *g.nearest_node({0.0, 0.5, 0.0}));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(tr[i] == doctest::Approx(std::max(phi[i] - t, 0.0)));
  CHECK_THROWS_AS(truncate_component(phi, t, *g.nearest_node({0.0, 0.1, 0.0})), Error);
}

TEST_CASE("truncations of two components have disjoint supports") {
  const Grid g(2, 129);
  const ScalarField phi = builtins::two_bump(g);
  const double level = 0.05;
  const std::size_t s1 = *g.nearest_node({-0.55, 0.45, 0.0}), s2 = *g.nearest_node({0.55, 0.45, 0.0});
  const ScalarField a = truncate_component(phi, level, s1);
  const ScalarField b = truncate_component(phi, level, s2);
  std::vector<std::uint8_t> flags(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) flags[i] = phi[i] > level ? 1 : 0;
  const auto labels = oracle::union_find_labels(g, flags);
  REQUIRE(labels[s1] != labels[s2]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK_FALSE((a[i] > 0.0 && b[i] > 0.0));
    if (a[i] > 0.0) CHECK(labels[i] == labels[s1]);
    if (b[i] > 0.0) CHECK(labels[i] == labels[s2]);
  }
  CHECK(b[s1] == 0.0);
}

TEST_CASE("geometric radii") {
  const auto r = geometric_radii(0.1, 0.8, 4);
  REQUIRE(r.size() == 4);
  CHECK(r.front() == doctest::Approx(0.1));
  CHECK(r.back() == doctest::Approx(0.8));
  CHECK(r[1] / r[0] == doctest::Approx(2.0));
}
