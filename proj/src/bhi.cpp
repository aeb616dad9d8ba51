#include "harnacklab/bhi.hpp"

#include <limits>

#include "harnacklab/hypotheses.hpp"

namespace harnack {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double normalization_at(const HarmonicField& u, const HarmonicField& v, std::size_t P) {
  if (!u.mask().inside(P)) throw Error("normalization point P is outside Omega");
  const double a = u[P], b = v[P];
  if (a < 0.0 || b < 0.0) throw Error("u or v is negative at P");
  if (a == 0.0 && b == 0.0) throw Error("u and v both vanish at P");
  if (a == 0.0 || b == 0.0) return nan;  // incomparable pair
  return a / b;
}

double ball_max(const HarmonicField& f, const Point& c, double r) {
  double m = 0.0;
  f.grid().for_each_in_ball(c, r, [&](std::size_t j) {
    if (f.mask().inside(j)) m = std::max(m, f[j]);
  });
  return m;
}

}  // namespace

double pair_M(const HarmonicField& u, const HarmonicField& v, std::size_t P, const Point& center, double r,
              double floor, std::size_t* used, std::size_t* excluded) {
  const double c = normalization_at(u, v, P);
  if (std::isnan(c)) return inf;
  const double cut = floor * ball_max(u, center, r);
  double M = 1.0;
  std::size_t n_used = 0, n_excl = 0;
  u.grid().for_each_in_ball(center, r, [&](std::size_t j) {
    if (!u.mask().inside(j)) return;
    const double a = u[j], b = c * v[j];
    if (!(std::min(a, b) >= cut) || !(std::min(a, b) > 0.0)) {
      ++n_excl;
      return;
    }
    ++n_used;
    M = std::max(M, std::max(a / b, b / a));
  });
  if (used) *used = n_used;
  if (excluded) *excluded = n_excl;
  return n_used > 0 ? M : nan;
}

BhiReport verify_inequality(const HarmonicField& u, const HarmonicField& v, std::size_t P, double rho, double floor) {
  if (!(u.grid() == v.grid())) throw Error("u and v live on different grids");
  if (!(rho > 0.0 && rho <= 1.0)) throw Error("rho must lie in (0, 1]");
  BhiReport rep;
  rep.rho = rho;
  rep.floor = floor;
  rep.P = P;
  const double c = normalization_at(u, v, P);
  if (std::isnan(c)) {
    rep.M = inf;
    rep.normalization = nan;
    rep.note = "exactly one of u, v vanishes at P: the pair is not comparable";
    return rep;
  }
  rep.normalization = c;
  rep.M = pair_M(u, v, P, {0.0, 0.0, 0.0}, rho, floor, &rep.nodes_used, &rep.nodes_excluded);
  if (std::isnan(rep.M)) {
    rep.note = "no admissible node in B_rho";
    return rep;
  }
  rep.pass = std::isfinite(rep.M);
  return rep;
}

std::optional<std::size_t> argmax_in_ball(const ScalarField& phi, const Point& center, double r) {
  std::optional<std::size_t> best;
  phi.grid().for_each_in_ball(center, r, [&](std::size_t j) {
    if (phi[j] > 0.0 && (!best || phi[j] > phi[*best])) best = j;
  });
  return best;
}

std::vector<OscLevel> oscillation_decay(const HarmonicField& u, const HarmonicField& v, const ScalarField& phi,
                                        std::size_t x0, const BhiSettings& s) {
  const Grid& g = u.grid();
  if (!(u.mask().inside(x0) || u.mask().is_boundary(x0))) throw Error("x0 must be in Omega or on its boundary");
  if (s.levels < 1) throw Error("levels must be positive");
  const double r_last = s.r0 * std::pow(0.5, s.levels - 1);
  if (r_last < 8.0 * g.h() * (1.0 - 1e-12)) throw Error("oscillation ladder reaches below 8h");
  const Point c0 = g.coords(x0);

  std::vector<OscLevel> out;
  double scale = 1.0;
  if (auto P0 = argmax_in_ball(phi, c0, 0.5 * s.r0); P0 && u[*P0] > 0.0 && v[*P0] > 0.0) scale = u[*P0] / v[*P0];

  for (int k = 0; k < s.levels; ++k) {
    OscLevel lv;
    lv.r = s.r0 * std::pow(0.5, k);
    const double cut = s.floor * ball_max(u, c0, lv.r);
    double lo = inf, hi = -inf;
    g.for_each_in_ball(c0, lv.r, [&](std::size_t j) {
      if (!u.mask().inside(j)) return;
      const double a = u[j], b = scale * v[j];
      if (!(std::min(a, b) >= cut) || !(std::min(a, b) > 0.0)) {
        ++lv.excluded;
        return;
      }
      ++lv.nodes;
      lo = std::min(lo, a / b);
      hi = std::max(hi, a / b);
    });
    lv.osc = lv.nodes > 0 ? hi - lo : 0.0;
    lv.reliable = lv.nodes >= static_cast<std::size_t>(s.min_nodes);
    lv.M_hat = nan;
    if (auto Pk = argmax_in_ball(phi, c0, 0.5 * lv.r); Pk && u.mask().inside(*Pk)) {
      try {
        lv.M_hat = pair_M(u, v, *Pk, c0, lv.r, s.floor);
      } catch (const Error&) {
        lv.M_hat = nan;
      }
    }
    lv.predicted = std::isfinite(lv.M_hat) ? 1.0 - 1.0 / (2.0 * lv.M_hat) : nan;
    lv.decay_factor = nan;
    out.push_back(lv);
  }
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    OscLevel& a = out[k];
    const OscLevel& b = out[k + 1];
    if (!a.reliable || !b.reliable) continue;
    a.decay_factor = a.osc > 0.0 ? b.osc / a.osc : 0.0;
    if (std::isfinite(a.predicted)) a.ok = a.decay_factor <= a.predicted + s.tol_osc;
  }
  return out;
}

HolderFit fit_holder(const std::vector<double>& r, const std::vector<double>& osc) {
  if (r.size() != osc.size()) throw Error("fit_holder: length mismatch");
  HolderFit fit;
  bool all_zero = !osc.empty();
  for (double o : osc) all_zero = all_zero && o == 0.0;
  if (all_zero && osc.size() >= 3) {
    fit.alpha = inf;
    fit.points = osc.size();
    return fit;
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (osc[k] > 0.0) {
      x.push_back(std::log(r[k]));
      y.push_back(std::log(osc[k]));
    }
  }
  if (x.size() < 3) throw Error("fit_holder: fewer than 3 usable levels");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  fit.alpha = sxy / sxx;
  fit.C = std::exp(my - fit.alpha * mx);
  fit.points = x.size();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    worst = std::max(worst, std::exp(y[k + 1] - y[k]));
  }
  // per-halving factor f gives a per-16-fold factor f^4, floor -ln(f^4)/ln 16
  fit.alpha_floor = worst > 0.0 ? -std::log(worst) / std::log(2.0) : inf;
  return fit;
}

HolderFit fit_holder(const std::vector<OscLevel>& levels) {
  std::vector<double> r, osc;
  for (const auto& lv : levels) {
    if (!lv.reliable) continue;
    r.push_back(lv.r);
    osc.push_back(lv.osc);
  }
  return fit_holder(r, osc);
}

GrowthResult growth_bound_check(const HarmonicField& w, const ScalarField& phi, double delta, double L_hat) {
  const Grid& g = w.grid();
  if (!(phi.grid() == g)) throw Error("w and phi live on different grids");
  GrowthResult out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.in_unit_ball(i) && phi[i] > delta) out.normalizer = std::max(out.normalizer, w[i]);
  }
  if (!(out.normalizer > 0.0)) throw Error("growth_bound_check: normalization set B_1 ∩ {phi > delta} is empty");
  const double floor = 2.0 * g.h() * L_hat;
  std::vector<std::size_t> S;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.norm(i) < 0.5 && w.mask().inside(i) && phi[i] > 0.0 && phi[i] >= floor) S.push_back(i);
  }
  if (S.empty()) throw Error("growth_bound_check: no node of B_1/2 ∩ Omega above the phi floor");
  out.nodes = S.size();
  for (std::size_t i : S) {
    const double wn = w[i] / out.normalizer;
    if (wn > 1.0 && phi[i] < L_hat) out.p = std::max(out.p, std::log(wn) / std::log(L_hat / phi[i]));
  }
  for (std::size_t i : S) out.C = std::max(out.C, (w[i] / out.normalizer) * std::pow(phi[i], out.p));
  return out;
}

bool stable_within(double a, double b, double rel, double abs_floor) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double d = std::abs(a - b);
  return d <= rel * std::max(std::abs(a), std::abs(b)) || d <= abs_floor;
}

double step2_exponent(double p) { return 1.0 / (2.0 * std::max(p, 0.5)); }

IntegrabilityResult weak_integrability_bound(const HarmonicField& w, double eps, double M_cfg, double scale) {
  const Grid& g = w.grid();
  if (!(eps > 0.0)) throw Error("weak_integrability_bound: eps must be positive");
  IntegrabilityResult out;
  out.eps = eps;
  const double hd = std::pow(g.h(), g.dim());
  std::vector<double> vals(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = w[i] * scale;
    if (x < 0.0) throw Error("weak_integrability_bound: negative w node");
    vals[i] = g.in_unit_ball(i) ? x : 0.0;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i)) continue;
    const double r = g.norm(i);
    const double p = vals[i] > 0.0 ? std::pow(vals[i], eps) * hd : 0.0;
    out.integral += p;
    if (r < 0.5) {
      out.integral_half += p;
      out.sup_half = std::max(out.sup_half, vals[i]);
    }
    if (r < 0.25) out.sup_quarter = std::max(out.sup_quarter, vals[i]);
  }
  out.scaled_sup_half = out.integral > 0.0 ? out.sup_half * std::pow(out.integral, -1.0 / eps) : 0.0;
  out.defect = subharmonic_defect(ScalarField(g, vals, Role::auxiliary));
  out.pass = out.scaled_sup_half <= M_cfg;
  return out;
}

double step2_integral_bound(const Grid& grid, double C, double alpha, double p, double Lambda) {
  if (alpha * p >= 1.0) return inf;
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) count += grid.norm(i) < 0.5 ? 1 : 0;
  const double vol = static_cast<double>(count) * std::pow(grid.h(), grid.dim());
  return std::pow(C, alpha) * vol * (1.0 + Lambda * alpha * p / (1.0 - alpha * p));
}

PairCheck step3_pair_check(const HarmonicField& u, const HarmonicField& v, std::size_t P, const ScalarField& phi,
                           double rho, double delta, double C_max) {
  PairCheck out;
  const double c = normalization_at(u, v, P);
  if (std::isnan(c)) {
    out.C_star = inf;
    return out;
  }
  double q = 1.0;
  u.grid().for_each_in_ball({0.0, 0.0, 0.0}, rho, [&](std::size_t j) {
    if (!(phi[j] > delta * rho)) return;
    ++out.nodes;
    const double a = u[j], b = c * v[j];
    q = (a > 0.0 && b > 0.0) ? std::max(q, std::max(a / b, b / a)) : inf;
  });
  if (out.nodes == 0) {
    out.C_star = nan;
    return out;
  }
  out.C_star = 1.0;
  // rounding slack so that proportional pairs give exactly 1
  while (out.C_star < q * (1.0 - 1e-12) && std::isfinite(out.C_star)) out.C_star *= 2.0;
  out.pass = out.C_star <= C_max;
  return out;
}

DeGiorgiResult de_giorgi_check(const ScalarField& w, double slack_h) {
  const Grid& g = w.grid();
  DeGiorgiResult out;
  std::size_t zeros = 0, total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i)) continue;
    const double x = w[i];
    if (x < -1e-12 || x > 1.0 + 1e-12) throw Error("de_giorgi_check: w must take values in [0, 1] on B_1");
    const double r = g.norm(i);
    if (r < 0.25) {
      ++total;
      zeros += x == 0.0 ? 1 : 0;
    }
    if (r < 0.5) out.max_half = std::max(out.max_half, x);
  }
  out.zero_fraction = total > 0 ? static_cast<double>(zeros) / static_cast<double>(total) : 0.0;
  out.bound = 1.0 - std::pow(8.0, -g.dim()) * out.zero_fraction + slack_h * g.h();
  out.defect = subharmonic_defect(w);
  out.pass = out.max_half <= out.bound;
  return out;
}

}  // namespace harnack
