#include <doctest.h>

#include <cmath>
#include <numbers>

#include "harnacklab/builtins.hpp"
#include "harnacklab/corpus.hpp"
#include "harnacklab/hypotheses.hpp"
#include "oracles.hpp"

using namespace harnack;

namespace {

double kappa_of(const ScalarField& phi) { return estimate_kappa(phi, distance_transform(mask_from_state(phi))); }

}  // namespace

TEST_CASE("lipschitz of linear and zero fields") {
  const Grid g(2, 65);
  CHECK(estimate_lipschitz(builtins::halfspace(g)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_lipschitz(make_state(g, std::vector<double>(g.size(), 0.0))) == 0.0);
}

TEST_CASE("lipschitz of the sector matches the pair scan") {
  const Grid g(2, 129);
  const ScalarField phi = builtins::sector(g);
  const double L = estimate_lipschitz(phi);
  CHECK(L >= 1.9);
  CHECK(L <= 2.0);
  const Grid small(2, 33);
  const ScalarField s = builtins::sector(small);
  CHECK(estimate_lipschitz(s) == doctest::Approx(oracle::brute_force_lipschitz(s)).epsilon(1e-15));
}

TEST_CASE("kappa on flat and scaled half-spaces") {
  const Grid g(2, 129);
  CHECK(std::abs(kappa_of(builtins::halfspace(g)) - 1.0) <= 2 * g.h());
  CHECK(std::abs(kappa_of(builtins::halfspace(g, 2.0)) - 2.0) <= 4 * g.h());
}

TEST_CASE("kappa of the sector decays with resolution") {
  double prev = INFINITY;
  for (int n : {65, 129, 257}) {
    const double k = kappa_of(builtins::sector(Grid(2, n)));
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("kappa rejects thin domains") {
  const Grid g(2, 33);
  std::vector<double> v(g.size(), 0.0);
  v[*g.nearest_node({0.0, 0.1, 0.0})] = 1.0;
  const ScalarField phi = make_state(g, v);
  CHECK_THROWS_WITH_AS(kappa_of(phi), doctest::Contains("too thin"), Error);
}

TEST_CASE("subharmonic defect") {
  const Grid g(2, 65);
  CHECK(subharmonic_defect(builtins::halfspace(g)) == 0.0);
  CHECK(subharmonic_defect(builtins::paraboloid(g)) == doctest::Approx(-4.0).epsilon(1e-9));
  const Grid g3(3, 17);
  CHECK(subharmonic_defect(builtins::paraboloid(g3)) == doctest::Approx(-6.0).epsilon(1e-9));
}

TEST_CASE("density on the half-space") {
  const Grid g(2, 129);
  const double mu = estimate_density(mask_from_state(builtins::halfspace(g)));
  CHECK(std::abs(mu - 0.5) <= 2 * g.h());
}

TEST_CASE("density of a punctured ball fails") {
  const Grid g(2, 33);
  std::vector<double> v(g.size(), 1.0);
  v[g.origin()] = 0.0;
  const double mu = estimate_density(mask_from_state(make_state(g, v)));
  CHECK(mu < Thresholds{}.mu_min);
}

TEST_CASE("density of an inner ball matches the lens oracle") {
  const Grid g(2, 129);
  const DomainMask m = mask_from_state(builtins::ball(g, 0.5));
  const double mu = estimate_density(m);
  CHECK(mu >= 0.5 - 2 * g.h());
  // the worst case for a convex ball is the largest admissible radius at a boundary node
  double worst = 1.0;
  for (std::size_t x0 : m.boundary_nodes()) {
    const Point c = g.coords(x0);
    const double r = 1.0 - g.norm(x0);
    worst = std::min(worst, oracle::lens_exterior_fraction(c, r, 0.5, 200000, x0));
    break;
  }
  CHECK(mu <= worst + 0.05);
}

TEST_CASE("level constant on the half-space approaches 2/pi") {
  const Grid g(2, 257);
  const double lam = estimate_level_constant(builtins::halfspace(g));
  CHECK(std::abs(lam - 2.0 / std::numbers::pi) <= 0.05);
  // the largest sampled t is 1, where the slab-in-disk ratio is smallest
  CHECK(oracle::slab_disk_ratio(1e-6) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-6));
  CHECK(lam >= oracle::slab_disk_ratio(1.0) - 0.05);
}

TEST_CASE("level constant scales like 1/c") {
  const Grid g(2, 257);
  const double base = estimate_level_constant(builtins::halfspace(g));
  const double half = estimate_level_constant(builtins::halfspace(g, 0.5));
  const double twice = estimate_level_constant(builtins::halfspace(g, 2.0));
  CHECK(half > base);
  CHECK(twice <= base);
  CHECK(half == doctest::Approx(2.0 * base).epsilon(0.15));
}

TEST_CASE("plateau fails the level condition") {
  const Grid g(2, 129);
  CHECK(estimate_level_constant(builtins::plateau(g, 0.05)) > Thresholds{}.Lambda_max);
}

TEST_CASE("nondegeneracy") {
  const Grid g(2, 129);
  CHECK(std::abs(estimate_nondegeneracy(builtins::halfspace(g)) - 1.0) <= 2 * g.h());
  const double fine = estimate_nondegeneracy(builtins::halfspace_squared(Grid(2, 257)));
  CHECK(fine < Thresholds{}.eta_min);
}

TEST_CASE("nondegeneracy of a minimizer against all radii") {
  const Grid g(2, 65);
  FbSettings st;
  st.coarsest_n = 17;
  const CorpusEntry e = corpus_entries()[1];
  const FbSolution sol = minimize({e.Lambda, corpus_data(e, g), st});
  const double eta = estimate_nondegeneracy(sol.phi);
  CHECK(eta >= Thresholds{}.eta_min);
  // dyadic radii are a subset of the exhaustive scan, and consecutive radii differ by at most 2x
  const double all = oracle::exhaustive_nondegeneracy(sol.phi, mask_from_state(sol.phi));
  CHECK(all <= eta + 1e-12);
  CHECK(all >= 0.5 * eta - 1e-12);
}

TEST_CASE("full report on the half-space") {
  const Grid g(2, 129);
  const HypothesisReport r = full_report(builtins::halfspace(g));
  CHECK(r.all_pass());
  CHECK(r.L_hat == doctest::Approx(1.0));
  CHECK(std::abs(r.kappa_hat - 1.0) <= 2 * g.h());
  CHECK(std::abs(r.mu_hat - 0.5) <= 2 * g.h());
  CHECK(std::abs(r.eta_hat - 1.0) <= 2 * g.h());
  CHECK(r.verdicts.size() == 7);
  CHECK(r.kappa_hat <= r.L_hat + 3 * g.h());
}

TEST_CASE("full report on the paraboloid fails (d) only through the defect") {
  const Grid g(2, 65);
  const ScalarField p = builtins::paraboloid(g);
  std::vector<double> v(p.values().begin(), p.values().end());
  const HypothesisReport r = full_report(make_state(g, v));
  CHECK_FALSE(r.verdicts.at('d').pass);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("full report on the sector fails (c)") {
  const HypothesisReport r = full_report(builtins::sector(Grid(2, 257)));
  CHECK_FALSE(r.verdicts.at('c').pass);
  CHECK(r.verdicts.at('b').pass);
  CHECK(r.verdicts.at('d').pass);
}

TEST_CASE("half-space estimates converge with resolution") {
  double eL = INFINITY, ek = INFINITY, em = INFINITY, ee = INFINITY;
  for (int n : {65, 129, 257}) {
    const HypothesisReport r = full_report(builtins::halfspace(Grid(2, n)));
    CHECK(std::abs(r.L_hat - 1.0) <= eL);
    CHECK(std::abs(r.kappa_hat - 1.0) <= ek);
    CHECK(std::abs(r.mu_hat - 0.5) <= em);
    CHECK(std::abs(r.eta_hat - 1.0) <= ee);
    eL = std::abs(r.L_hat - 1.0);
    ek = std::abs(r.kappa_hat - 1.0);
    em = std::abs(r.mu_hat - 0.5);
    ee = std::abs(r.eta_hat - 1.0);
  }
}
