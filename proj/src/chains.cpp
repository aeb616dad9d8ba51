#include "harnacklab/chains.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

#include "harnacklab/builtins.hpp"
#include "harnacklab/components.hpp"

namespace harnack {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<std::size_t> annulus_nodes(const Grid& grid, std::size_t x0, double r) {
  const Point c = grid.coords(x0);
  const double half = 0.5 * grid.h() * (1.0 + 1e-9);
  std::vector<std::size_t> out;
  grid.for_each_in_ball(c, r + half + 1e-12, [&](std::size_t j) {
    if (std::abs(distance(grid.coords(j), c, grid.dim()) - r) <= half) out.push_back(j);
  });
  std::sort(out.begin(), out.end());
  return out;
}

StepResult improving_step(const ScalarField& phi, const ScalarField& dist, std::size_t x0,
                          const ChainSettings& settings) {
  const Grid& g = phi.grid();
  if (!(phi[x0] > 0.0) || !g.in_unit_ball(x0)) throw Error("improving_step: x0 is not in Omega");
  const double r = dist[x0];
  if (r < 2.0 * g.h() * (1.0 - 1e-12)) throw Error("improving_step: dist(x0) < 2h");
  if (!(3.0 * r < 1.0 - g.norm(x0))) throw Error("improving_step: 3 dist(x0) >= 1 - |x0|");

  const Point c = g.coords(x0);
  std::size_t best = x0;
  double best_val = -1.0;
  double best_off = std::numeric_limits<double>::infinity();
  for (std::size_t y : annulus_nodes(g, x0, r)) {
    const double off = std::abs(distance(g.coords(y), c, g.dim()) - r);
    if (phi[y] > best_val || (phi[y] == best_val && off < best_off)) {
      best = y;
      best_val = phi[y];
      best_off = off;
    }
  }
  const double ratio = best_val / phi[x0];
  if (!(ratio >= 1.0 + settings.sigma_min)) {
    throw ChainError("improving_step: best ratio " + std::to_string(ratio) + " below 1 + sigma_min", best, ratio);
  }
  return {best, ratio};
}

int chain_step_bound(double target, double phi0, double sigma) {
  if (phi0 >= target) return 0;
  return static_cast<int>(std::ceil(std::log(target / phi0) / std::log1p(sigma) - 1e-12));
}

HarnackChain escape_chain(const ScalarField& phi, const ScalarField& dist, std::size_t x0, double delta,
                          const ChainSettings& settings) {
  if (!(delta > 0.0)) throw Error("escape_chain: delta must be positive");
  if (!(phi[x0] > 0.5 * delta)) throw Error("escape_chain: phi(x0) <= delta/2");
  HarnackChain chain;
  chain.points.push_back(x0);
  double sigma = std::numeric_limits<double>::infinity();
  const int n_max = chain_step_bound(delta, phi[x0], settings.sigma_min);
  std::size_t x = x0;
  while (!(phi[x] > delta)) {
    if (static_cast<int>(chain.steps()) >= n_max) throw Error("escape_chain: step bound exceeded");
    const StepResult step = improving_step(phi, dist, x, settings);
    chain.radii.push_back(dist[x]);
    chain.points.push_back(step.node);
    sigma = std::min(sigma, step.ratio - 1.0);
    x = step.node;
  }
  chain.sigma_achieved = chain.steps() == 0 ? nan : sigma;
  chain.H_bound = std::pow(settings.H_cfg, static_cast<double>(chain.steps()));
  chain.terminal_level = phi[x];
  validate_chain(chain, phi, settings);
  return chain;
}

void validate_chain(const HarnackChain& chain, const ScalarField& phi, const ChainSettings& settings) {
  const Grid& g = phi.grid();
  if (chain.points.empty()) throw Error("chain: no points");
  if (chain.radii.size() != chain.steps()) throw Error("chain: radii and steps disagree");
  for (std::size_t k = 0; k < chain.steps(); ++k) {
    const std::size_t a = chain.points[k], b = chain.points[k + 1];
    const double len = distance(g.coords(a), g.coords(b), g.dim());
    if (std::abs(len - chain.radii[k]) > g.h()) throw Error("chain: step " + std::to_string(k) + " leaves the sphere");
    if (phi[b] < (1.0 + settings.sigma_min) * phi[a]) throw Error("chain: step " + std::to_string(k) + " too small");
  }
  const int n_max = chain_step_bound(chain.terminal_level, phi[chain.points.front()], settings.sigma_min);
  if (static_cast<int>(chain.steps()) > std::max(n_max, 0)) throw Error("chain: more steps than the bound allows");
}

TransferResult chain_transfer_bound(const HarnackChain& chain, const HarmonicField& w, double H_cfg) {
  TransferResult out;
  for (std::size_t p : chain.points) {
    if (!(w[p] > 0.0)) throw Error("chain_transfer_bound: w is not positive at a chain node");
  }
  for (std::size_t k = 0; k < chain.steps(); ++k) {
    const double a = w[chain.points[k]], b = w[chain.points[k + 1]];
    out.max_step_ratio = std::max(out.max_step_ratio, std::max(a / b, b / a));
  }
  const double a = w[chain.points.front()], b = w[chain.points.back()];
  out.end_to_end_ratio = std::max(a / b, b / a);
  out.step_ok = out.max_step_ratio <= H_cfg;
  out.end_ok = out.end_to_end_ratio <= std::pow(H_cfg, static_cast<double>(chain.steps()));
  return out;
}

std::vector<std::uint8_t> superlevel_flags(const ScalarField& phi, double level, double R) {
  const Grid& g = phi.grid();
  std::vector<std::uint8_t> flags(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) flags[i] = (phi[i] > level && g.norm(i) < R) ? 1 : 0;
  return flags;
}

ConnectResult connect_away(const ScalarField& phi, std::size_t x1, std::size_t x2, double delta, double R,
                           double tau) {
  const Grid& g = phi.grid();
  if (!(R > 0.0 && R <= 1.0) || !(delta > 0.0) || !(tau > 0.0 && tau < 1.0)) {
    throw Error("connect_away: need 0 < R <= 1, delta > 0, 0 < tau < 1");
  }
  for (std::size_t x : {x1, x2}) {
    if (!(g.norm(x) < tau * R) || !(phi[x] > delta * R)) {
      throw Error("connect_away: endpoint outside B_{tau R} ∩ {phi > delta R}");
    }
  }
  const auto flags = superlevel_flags(phi, 0.5 * delta * R, R);
  ConnectResult out;
  if (auto path = shortest_path(g, flags, x1, x2)) {
    out.connected = true;
    out.path = std::move(*path);
    return out;
  }
  const Labeling lab = label_components(g, flags);
  out.label1 = lab.labels[x1];
  out.label2 = lab.labels[x2];
  return out;
}

std::optional<double> largest_working_tau(const ScalarField& phi, double delta, double R, double step) {
  const Grid& g = phi.grid();
  const Labeling lab = label_components(g, superlevel_flags(phi, 0.5 * delta * R, R));
  std::optional<double> best;
  for (int k = 1; k * step < 1.0 - 1e-12; ++k) {
    const double tau = k * step;
    std::uint32_t seen = 0;
    bool ok = true;
    for (std::size_t i = 0; i < g.size() && ok; ++i) {
      if (!(phi[i] > delta * R) || !(g.norm(i) < tau * R)) continue;
      if (seen == 0) seen = lab.labels[i];
      ok = lab.labels[i] == seen;
    }
    if (!ok) break;
    best = tau;
  }
  return best;
}

std::vector<std::size_t> near_boundary_seeds(const ScalarField& phi, const ScalarField& dist, double delta,
                                             std::size_t count, std::uint64_t seed) {
  const Grid& g = phi.grid();
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i) || g.norm(i) >= 0.5) continue;
    if (!(phi[i] > 0.5 * delta && phi[i] <= delta)) continue;
    if (dist[i] < 2.0 * g.h() || 3.0 * dist[i] >= 1.0 - g.norm(i)) continue;
    pool.push_back(i);
  }
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates with an explicit index draw, stable across standard libraries
  const std::size_t k = std::min(count, pool.size());
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng() % (pool.size() - j));
    std::swap(pool[j], pool[r]);
  }
  pool.resize(k);
  return pool;
}

HarmonicField random_positive_field(const DomainMask& mask, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const int dim = mask.grid().dim();
  const double b = 0.1 + unit();
  std::vector<double> a(4), ph(4);
  for (int k = 0; k < 4; ++k) {
    a[k] = unit();
    ph[k] = 2.0 * std::numbers::pi * unit();
  }
  auto data = [=](const Point& x) {
    double s = b;
    if (dim == 2) {
      const double t = std::atan2(x[1], x[0]);
      for (int k = 0; k < 4; ++k) s += a[k] * 0.5 * (1.0 + std::cos((k + 1) * t + ph[k]));
    } else {
      const double r = std::max(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), 1e-300);
      for (int k = 0; k < 3; ++k) s += a[k] * 0.5 * (1.0 + x[k] / r);
    }
    return s;
  };
  SolverSettings st;
  st.tol = tol;
  return solve_with_sphere_data(mask, data, st);
}

double max_step_ratio(const std::vector<HarnackChain>& chains, const std::vector<HarmonicField>& fields) {
  double out = 1.0;
  for (const auto& w : fields) {
    for (const auto& c : chains) out = std::max(out, chain_transfer_bound(c, w, inf).max_step_ratio);
  }
  return out;
}

double calibrate_harnack_constant(int n, double delta, std::size_t seeds, std::size_t fields, std::uint64_t seed,
                                  double margin) {
  const Grid g(2, n);
  const ScalarField phi = builtins::halfspace(g);
  const DomainMask mask = mask_from_state(phi);
  const ScalarField dist = distance_transform(mask);
  std::vector<HarnackChain> chains;
  for (std::size_t x0 : near_boundary_seeds(phi, dist, delta, seeds, seed)) {
    chains.push_back(escape_chain(phi, dist, x0, delta));
  }
  std::vector<HarmonicField> ws;
  for (std::size_t j = 0; j < fields; ++j) ws.push_back(random_positive_field(mask, seed + 1 + j));
  return margin * max_step_ratio(chains, ws);
}

}  // namespace harnack
