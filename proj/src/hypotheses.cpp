#include "harnacklab/hypotheses.hpp"

#include <limits>
#include <mutex>
#include <numbers>

#include "harnacklab/parallel.hpp"

namespace harnack {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

// Reduces f(x0) over boundary nodes with min or max; order independent.
template <class F>
double reduce_boundary(std::span<const std::size_t> nodes, double init, bool take_min, F&& f) {
  std::vector<double> partial;
  std::mutex m;
  parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
    double acc = init;
    for (std::size_t k = b; k < e; ++k) {
      const double v = f(nodes[k]);
      acc = take_min ? std::min(acc, v) : std::max(acc, v);
    }
    std::lock_guard lock(m);
    partial.push_back(acc);
  });
  double out = init;
  for (double v : partial) out = take_min ? std::min(out, v) : std::max(out, v);
  return out;
}

}  // namespace

bool HypothesisReport::all_pass() const {
  for (const auto& [k, v] : verdicts) {
    if (!v.pass) return false;
  }
  return verdicts.size() == 7;
}

std::vector<double> dyadic_radii(double rho_max, double floor) {
  std::vector<double> r;
  for (double v = rho_max; v >= floor && v > 0.0; v *= 0.5) r.push_back(v);
  return r;
}

double estimate_lipschitz(const ScalarField& phi) {
  const Grid& g = phi.grid();
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i)) continue;
    const Index idx = g.multi_index(i);
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[static_cast<std::size_t>(a)] + 1 >= g.n()) continue;
      const std::size_t j = i + g.stride(a);
      if (!g.in_unit_ball(j)) continue;
      best = std::max(best, std::abs(phi[i] - phi[j]));
    }
  }
  return best / g.h();
}

double estimate_kappa(const ScalarField& phi, const ScalarField& dist) {
  const Grid& g = phi.grid();
  if (!(dist.grid() == g)) throw Error("distance field lives on a different grid");
  const double floor = 2.0 * g.h() * (1.0 - 1e-12);
  double best = inf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(phi[i] > 0.0) || !g.in_unit_ball(i) || g.norm(i) >= 0.5 || dist[i] < floor) continue;
    best = std::min(best, phi[i] / dist[i]);
  }
  if (best == inf) throw Error("domain too thin for κ estimate");
  return best;
}

double subharmonic_defect(const ScalarField& phi) {
  const Grid& g = phi.grid();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i)) continue;
    double s = 0.0;
    bool interior = true;
    g.for_each_neighbor(i, [&](std::size_t j) {
      interior = interior && g.in_unit_ball(j);
      s += phi[j];
    });
    if (!interior) continue;
    worst = std::min(worst, (s - 2.0 * g.dim() * phi[i]) * inv_h2);
  }
  return worst;
}

double subharmonic_tolerance(double L_hat, double h, double c_tol) { return c_tol * L_hat / h; }

double estimate_density(const DomainMask& mask) {
  const Grid& g = mask.grid();
  const auto nodes = mask.boundary_nodes();
  if (nodes.empty()) throw Error("domain has no boundary nodes");
  const double floor = 4.0 * g.h();
  const double best = reduce_boundary(nodes, inf, true, [&](std::size_t x0) {
    double local = inf;
    const Point c = g.coords(x0);
    for (double r : dyadic_radii(1.0 - g.norm(x0), floor)) {
      std::size_t total = 0, outside = 0;
      g.for_each_in_ball(c, r, [&](std::size_t j) {
        ++total;
        outside += mask.inside(j) ? 0 : 1;
      });
      if (total > 0) local = std::min(local, static_cast<double>(outside) / static_cast<double>(total));
    }
    return local;
  });
  if (best == inf) throw Error("resolution too coarse for the density estimate");
  return best;
}

std::vector<double> level_t_grid(double L_hat, double h) {
  std::vector<double> t;
  const double floor = 2.0 * L_hat * h;
  for (double v = 1.0; v >= floor && v > 0.0; v *= 0.5) t.push_back(v);
  return t;
}

double estimate_level_constant(const ScalarField& phi, const DomainMask& mask, double L_hat) {
  const Grid& g = phi.grid();
  const auto nodes = mask.boundary_nodes();
  if (nodes.empty()) throw Error("domain has no boundary nodes");
  const double rfloor = 8.0 * g.h();
  const double tfloor = 2.0 * L_hat * g.h();
  const double best = reduce_boundary(nodes, -inf, false, [&](std::size_t x0) {
    double local = -inf;
    const Point c = g.coords(x0);
    std::vector<std::size_t> hist;
    for (double r : dyadic_radii(1.0 - g.norm(x0), rfloor)) {
      // levels t_m = 2^-m with r t_m >= 2 L h
      int m_max = -1;
      for (double t = 1.0; r * t >= tfloor; t *= 0.5) ++m_max;
      if (m_max < 0) continue;
      hist.assign(static_cast<std::size_t>(m_max) + 1, 0);
      std::size_t total = 0;
      g.for_each_in_ball(c, r, [&](std::size_t j) {
        ++total;
        const double v = phi[j];
        if (!(v > 0.0)) return;
        double level = r;
        for (int m = 0; m <= m_max && v < level; ++m, level *= 0.5) ++hist[static_cast<std::size_t>(m)];
      });
      double t = 1.0;
      for (int m = 0; m <= m_max; ++m, t *= 0.5) {
        local = std::max(local, static_cast<double>(hist[static_cast<std::size_t>(m)]) / (t * total));
      }
    }
    return local;
  });
  if (best == -inf) throw Error("no admissible (x0, r, t) for the level-set estimate");
  return best;
}

double estimate_level_constant(const ScalarField& phi) {
  return estimate_level_constant(phi, mask_from_state(phi), estimate_lipschitz(phi));
}

double ball_sup(const ScalarField& phi, const Point& center, double r) {
  const Grid& g = phi.grid();
  double best = -inf;
  g.for_each_in_ball(center, r, [&](std::size_t j) { best = std::max(best, phi[j]); });
  const double spacing = 0.5 * g.h();
  auto probe = [&](const Point& dir) {
    Point y{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      y[ua] = std::clamp(center[ua] + r * dir[ua], -1.0, 1.0);
    }
    best = std::max(best, phi.sample(y));
  };
  if (g.dim() == 2) {
    const int k = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / spacing)));
    for (int i = 0; i < k; ++i) {
      const double th = 2.0 * std::numbers::pi * i / k;
      probe({std::cos(th), std::sin(th), 0.0});
    }
  } else {
    const int k = std::max(64, static_cast<int>(std::ceil(4.0 * std::numbers::pi * r * r / (spacing * spacing))));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < k; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / k;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      probe({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
    }
  }
  return best;
}

double estimate_nondegeneracy(const ScalarField& phi, const DomainMask& mask) {
  const Grid& g = phi.grid();
  const auto nodes = mask.boundary_nodes();
  if (nodes.empty()) throw Error("domain has no boundary nodes");
  const double floor = 4.0 * g.h();
  const double best = reduce_boundary(nodes, inf, true, [&](std::size_t x0) {
    double local = inf;
    const Point c = g.coords(x0);
    for (double r : dyadic_radii(1.0 - g.norm(x0), floor)) local = std::min(local, ball_sup(phi, c, r) / r);
    return local;
  });
  if (best == inf) throw Error("no admissible radius for the nondegeneracy estimate");
  return best;
}

double estimate_nondegeneracy(const ScalarField& phi) { return estimate_nondegeneracy(phi, mask_from_state(phi)); }

HypothesisReport full_report(const ScalarField& phi, const Thresholds& th) {
  if (phi.role() != Role::state) throw Error("full_report needs a field with role 'state'");
  const Grid& g = phi.grid();
  HypothesisReport rep;
  rep.thresholds = th;
  rep.meta.dim = g.dim();
  rep.meta.n = g.n();
  rep.meta.h = g.h();
  rep.meta.radius_rule = "r = 2^-j (1 - |x0|)";
  rep.meta.density_radius_floor = 4.0 * g.h();
  rep.meta.level_radius_floor = 8.0 * g.h();
  rep.meta.t_floor_factor = 2.0;
  rep.meta.kappa_dist_floor = 2.0 * g.h();

  auto fail = [](const std::string& note) { return Verdict{false, nan, nan, note}; };

  // (a) positivity on Omega and vanishing outside holds by construction of a state
  // field; what remains checkable is that Omega is nonempty.
  std::optional<DomainMask> mask;
  try {
    mask.emplace(mask_from_state(phi));
    rep.verdicts['a'] = {true, static_cast<double>(mask->count()), 1.0, "phi >= 0, phi = 0 off Omega"};
    rep.meta.origin_on_boundary = mask->is_boundary(g.origin());
  } catch (const Error& e) {
    rep.verdicts['a'] = fail(e.what());
  }

  rep.L_hat = estimate_lipschitz(phi);
  rep.verdicts['b'] = {std::isfinite(rep.L_hat) && rep.L_hat <= th.L_max, rep.L_hat, th.L_max, ""};

  rep.subharmonic_defect = subharmonic_defect(phi);
  rep.meta.tol_sub = subharmonic_tolerance(rep.L_hat, g.h(), th.c_tol);
  rep.verdicts['d'] = {rep.subharmonic_defect >= -rep.meta.tol_sub, rep.subharmonic_defect, -rep.meta.tol_sub, ""};
  rep.meta.t_grid = level_t_grid(rep.L_hat, g.h());

  rep.kappa_hat = rep.mu_hat = rep.Lambda_hat = rep.eta_hat = nan;
  if (!mask) {
    for (char c : {'c', 'e', 'f', 'g'}) rep.verdicts[c] = fail("empty domain");
    return rep;
  }
  try {
    rep.kappa_hat = estimate_kappa(phi, distance_transform(*mask));
    rep.verdicts['c'] = {rep.kappa_hat >= th.kappa_min, rep.kappa_hat, th.kappa_min, ""};
  } catch (const Error& e) {
    rep.verdicts['c'] = fail(e.what());
  }
  try {
    rep.mu_hat = estimate_density(*mask);
    rep.verdicts['e'] = {rep.mu_hat >= th.mu_min, rep.mu_hat, th.mu_min, ""};
  } catch (const Error& e) {
    rep.verdicts['e'] = fail(e.what());
  }
  try {
    rep.Lambda_hat = estimate_level_constant(phi, *mask, rep.L_hat);
    rep.verdicts['f'] = {rep.Lambda_hat <= th.Lambda_max, rep.Lambda_hat, th.Lambda_max, ""};
  } catch (const Error& e) {
    rep.verdicts['f'] = fail(e.what());
  }
  try {
    rep.eta_hat = estimate_nondegeneracy(phi, *mask);
    rep.verdicts['g'] = {rep.eta_hat >= th.eta_min, rep.eta_hat, th.eta_min, ""};
  } catch (const Error& e) {
    rep.verdicts['g'] = fail(e.what());
  }
  return rep;
}

}  // namespace harnack
