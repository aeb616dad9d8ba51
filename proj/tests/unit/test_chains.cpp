#include <doctest.h>

#include <cmath>

#include "harnacklab/builtins.hpp"
#include "harnacklab/chains.hpp"
#include "harnacklab/components.hpp"
#include "harnacklab/hypotheses.hpp"
#include "oracles.hpp"

using namespace harnack;

namespace {

struct Setup {
  ScalarField phi;
  DomainMask mask;
  ScalarField dist;
  explicit Setup(ScalarField p) : phi(std::move(p)), mask(mask_from_state(phi)), dist(distance_transform(mask)) {}
};

}  // namespace

TEST_CASE("improving step doubles on the half-space") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  const std::size_t x0 = *g.nearest_node({0.0, 8 * g.h(), 0.0});
  const StepResult r = improving_step(s.phi, s.dist, x0);
  CHECK(r.node == *g.nearest_node({0.0, 16 * g.h(), 0.0}));
  CHECK(r.ratio == doctest::Approx(2.0));
  const Setup scaled(builtins::halfspace(g, 3.5));
  const StepResult rs = improving_step(scaled.phi, scaled.dist, x0);
  CHECK(rs.node == r.node);
  CHECK(rs.ratio == doctest::Approx(r.ratio));
}

TEST_CASE("improving step preconditions") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  CHECK_THROWS_WITH_AS(improving_step(s.phi, s.dist, *g.nearest_node({0.0, g.h(), 0.0})),
                       doctest::Contains("< 2h"), Error);
  CHECK_THROWS_WITH_AS(improving_step(s.phi, s.dist, *g.nearest_node({0.0, 0.4, 0.0})),
                       doctest::Contains("3 dist"), Error);
  CHECK_THROWS_AS(improving_step(s.phi, s.dist, *g.nearest_node({0.0, -0.2, 0.0})), Error);
}

TEST_CASE("flat plateau makes the step fail with its ratio") {
  const Grid g(2, 129);
  const Setup s(builtins::plateau(g, 0.05));
  try {
    improving_step(s.phi, s.dist, *g.nearest_node({0.0, 0.1, 0.0}));
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(e.ratio() == doctest::Approx(1.0));
  }
}

TEST_CASE("improving step on a minimizer agrees with an exhaustive annulus scan") {
  const auto& dom = fixture::corpus_domain(0);
  const Setup s(dom.rescaled.at(129).phi);
  const Grid& g = s.phi.grid();
  const auto seeds = near_boundary_seeds(s.phi, s.dist, 0.1, 50, 17);
  REQUIRE(seeds.size() == 50);
  for (std::size_t x0 : seeds) {
    const StepResult r = improving_step(s.phi, s.dist, x0);
    CHECK(r.ratio >= 1.05);
    CHECK(r.node == oracle::exhaustive_annulus_argmax(s.phi, x0, s.dist[x0], 0.5 * g.h()));
  }
}

TEST_CASE("escape chain lengths") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  const double delta = 0.1;
  const std::size_t x0 = *g.nearest_node({0.0, 0.6 * delta, 0.0});
  const HarnackChain c = escape_chain(s.phi, s.dist, x0, delta);
  CHECK(c.steps() == 1);
  CHECK(c.terminal_level > delta);
  CHECK(c.H_bound == doctest::Approx(ChainSettings{}.H_cfg));
  const HarnackChain none = escape_chain(s.phi, s.dist, *g.nearest_node({0.0, 0.2, 0.0}), delta);
  CHECK(none.steps() == 0);
  CHECK(std::isnan(none.sigma_achieved));
  CHECK_THROWS_AS(escape_chain(s.phi, s.dist, *g.nearest_node({0.0, 0.03, 0.0}), delta), Error);
}

TEST_CASE("escape chains on a minimizer respect the step bound") {
  const auto& dom = fixture::corpus_domain(1);
  const Setup s(dom.rescaled.at(129).phi);
  const int n_max = static_cast<int>(std::ceil(std::log(2.0) / std::log(1.05)));
  for (std::size_t x0 : near_boundary_seeds(s.phi, s.dist, 0.1, 20, 23)) {
    const HarnackChain c = escape_chain(s.phi, s.dist, x0, 0.1);
    CHECK(static_cast<int>(c.steps()) <= n_max);
    CHECK_NOTHROW(validate_chain(c, s.phi, {}));
    double travel = 0.0;
    for (double r : c.radii) travel += r;
    const double kappa = estimate_kappa(s.phi, s.dist);
    CHECK(travel <= c.steps() * 0.1 / kappa + s.phi.grid().h() * c.steps());
  }
}

TEST_CASE("validate chain catches broken invariants") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  HarnackChain c = escape_chain(s.phi, s.dist, *g.nearest_node({0.0, 0.06, 0.0}), 0.1);
  c.radii[0] *= 0.5;
  CHECK_THROWS_WITH_AS(validate_chain(c, s.phi, {}), doctest::Contains("leaves the sphere"), Error);
}

TEST_CASE("transfer ratios") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  const HarnackChain c = escape_chain(s.phi, s.dist, *g.nearest_node({0.0, 8 * g.h(), 0.0}), 12 * g.h());
  const HarmonicField one(oracle::field_from(g, [](const Point&) { return 1.0; }), s.mask, 0.0);
  const TransferResult t1 = chain_transfer_bound(c, one, 1.0);
  CHECK(t1.max_step_ratio == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t1.pass());
  const HarmonicField lin = solve_with_sphere_data(s.mask, [](const Point& x) { return std::max(x[1], 0.0); });
  const TransferResult t2 = chain_transfer_bound(c, lin, 4.0);
  CHECK(t2.max_step_ratio == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(chain_transfer_bound(c, lin, 1.5).pass());
  const HarmonicField zero = solve_with_sphere_data(s.mask, [](const Point&) { return 0.0; });
  CHECK_THROWS_AS(chain_transfer_bound(c, zero, 4.0), Error);
}

TEST_CASE("calibrated Harnack constant covers random fields on a minimizer") {
  const double H = calibrate_harnack_constant(129, 0.1, 50, 10, 1);
  CHECK(H >= 2.0);
  CHECK(H <= 4.0);
  const auto& dom = fixture::corpus_domain(2);
  const Setup s(dom.rescaled.at(129).phi);
  std::vector<HarnackChain> chains;
  for (std::size_t x0 : near_boundary_seeds(s.phi, s.dist, 0.1, 50, 5)) chains.push_back(escape_chain(s.phi, s.dist, x0, 0.1));
  for (std::uint64_t k = 0; k < 10; ++k) {
    const HarmonicField w = random_positive_field(s.mask, 100 + k);
    for (std::size_t i = 0; i < w.grid().size(); ++i) {
      if (s.mask.inside(i)) REQUIRE(w[i] > 0.0);
    }
    for (const auto& c : chains) CHECK(chain_transfer_bound(c, w, H).pass());
  }
}

TEST_CASE("seed selection is deterministic and admissible") {
  const Grid g(2, 129);
  const Setup s(builtins::halfspace(g));
  const auto a = near_boundary_seeds(s.phi, s.dist, 0.1, 30, 9);
  CHECK(a == near_boundary_seeds(s.phi, s.dist, 0.1, 30, 9));
  CHECK(a != near_boundary_seeds(s.phi, s.dist, 0.1, 30, 10));
  for (std::size_t x : a) {
    CHECK(s.phi[x] > 0.05);
    CHECK(s.phi[x] <= 0.1);
  }
}

TEST_CASE("connect away") {
  const Grid g(2, 129);
  const ScalarField half = builtins::halfspace(g);
  const ConnectResult r =
      connect_away(half, *g.nearest_node({-0.12, 0.12, 0.0}), *g.nearest_node({0.12, 0.12, 0.0}), 0.1, 0.8, 0.25);
  CHECK(r.connected);
  CHECK(r.path.front() == *g.nearest_node({-0.12, 0.12, 0.0}));

  // two separated bumps: the superlevel set splits
  const ScalarField bumps = oracle::field_from(
      g,
      [](const Point& x) {
        const double a = 0.1;
        const double l = std::hypot(x[0] + 0.12, x[1] - 0.1) < 0.08 ? x[1] - a + 0.2 : 0.0;
        const double rr = std::hypot(x[0] - 0.12, x[1] - 0.1) < 0.08 ? x[1] - a + 0.2 : 0.0;
        return std::max({l, rr, 0.0});
      },
      Role::state);
  const ConnectResult nc =
      connect_away(bumps, *g.nearest_node({-0.12, 0.1, 0.0}), *g.nearest_node({0.12, 0.1, 0.0}), 0.1, 0.8, 0.25);
  CHECK_FALSE(nc.connected);
  CHECK(nc.label1 != nc.label2);
  CHECK(nc.label1 > 0);
  CHECK_THROWS_AS(connect_away(half, *g.nearest_node({0.0, 0.01, 0.0}), *g.nearest_node({0.0, 0.1, 0.0}), 0.1,
                               0.8, 0.25),
                  Error);
}

TEST_CASE("connect away on a minimizer agrees with labeling") {
  const auto& dom = fixture::corpus_domain(3);
  const ScalarField& phi = dom.rescaled.at(129).phi;
  const Grid& g = phi.grid();
  const double delta = 0.1, R = 0.8, tau = 0.25;
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < g.size() && pts.size() < 400; ++i) {
    if (g.norm(i) < tau * R && phi[i] > delta * R) pts.push_back(i);
  }
  REQUIRE(pts.size() >= 10);
  std::vector<std::size_t> sample;
  for (std::size_t k = 0; k < 10; ++k) sample.push_back(pts[(k * 37) % pts.size()]);
  const auto labels = oracle::union_find_labels(g, superlevel_flags(phi, 0.5 * delta * R, R));
  for (std::size_t a = 0; a < sample.size(); ++a) {
    for (std::size_t b = a + 1; b < sample.size(); ++b) {
      const ConnectResult r = connect_away(phi, sample[a], sample[b], delta, R, tau);
      CHECK(r.connected);
      CHECK(r.connected == (labels[sample[a]] == labels[sample[b]]));
    }
  }
  const auto tau_max = largest_working_tau(phi, delta, R);
  REQUIRE(tau_max.has_value());
  CHECK(*tau_max >= tau);
}
