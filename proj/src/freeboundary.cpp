#include "harnacklab/freeboundary.hpp"

#include <deque>
#include <limits>
#include <random>

namespace harnack {

namespace {

using Components = std::vector<std::vector<double>>;

std::vector<std::uint8_t> ball_flags(const Grid& g) {
  std::vector<std::uint8_t> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.in_unit_ball(i) ? 1 : 0;
  return f;
}

// Data values on |x| >= 1 nodes of g, zero inside B_1.
Components data_on(const VectorField& data, const Grid& g) {
  Components out(data.k(), std::vector<double>(g.size(), 0.0));
  const bool same = data.grid() == g;
  for (std::size_t j = 0; j < data.k(); ++j) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.in_unit_ball(i)) continue;
      out[j][i] = same ? data[j][i] : data[j].sample(g.coords(i));
    }
  }
  return out;
}

double energy_of(const Grid& g, const std::vector<std::uint8_t>& ball, const Components& U, double Lambda) {
  const int d = g.dim();
  const double hd2 = std::pow(g.h(), d - 2);
  double grad = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index idx = g.multi_index(i);
    if (ball[i]) {
      double m = 0.0;
      for (const auto& u : U) m += u[i] * u[i];
      count += m > 0.0 ? 1 : 0;
    }
    for (int a = 0; a < d; ++a) {
      if (idx[static_cast<std::size_t>(a)] + 1 >= g.n()) continue;
      const std::size_t j = i + g.stride(a);
      if (!ball[i] && !ball[j]) continue;
      for (const auto& u : U) {
        const double diff = u[j] - u[i];
        grad += diff * diff;
      }
    }
  }
  return grad * hd2 + Lambda * std::pow(g.h(), d) * static_cast<double>(count);
}

void relax_all(const Grid& g, const std::vector<std::uint8_t>& S, Components& U, double tol) {
  SolverSettings s;
  s.tol = tol;
  for (auto& u : U) relax_in_place(g, S, u, s);
}

bool is_zero(const Components& U, std::size_t i) {
  for (const auto& u : U) {
    if (u[i] != 0.0) return false;
  }
  return true;
}

double sq_norm(const Components& U, std::size_t i) {
  double m = 0.0;
  for (const auto& u : U) m += u[i] * u[i];
  return m;
}

std::uint64_t support_hash(const std::vector<std::uint8_t>& S) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint8_t b : S) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

int parity(const Grid& g, std::size_t i) {
  const Index idx = g.multi_index(i);
  return (idx[0] + idx[1] + idx[2]) & 1;
}

struct Proposal {
  std::vector<std::size_t> remove;
  std::vector<std::size_t> add;
  bool empty() const { return remove.empty() && add.empty(); }
};

class Descent {
 public:
  Descent(const Grid& g, Components data, double Lambda, const FbSettings& st)
      : g_(g), ball_(ball_flags(g)), data_(std::move(data)), Lambda_(Lambda), st_(st) {}

  // Starts from support S with initial guesses U (data is written on |x| >= 1).
  void start(std::vector<std::uint8_t> S, Components U) {
    S_ = std::move(S);
    U_ = std::move(U);
    for (std::size_t j = 0; j < U_.size(); ++j) {
      for (std::size_t i = 0; i < g_.size(); ++i) {
        if (!ball_[i]) U_[j][i] = data_[j][i];
        else if (!S_[i]) U_[j][i] = 0.0;
      }
    }
    relax_all(g_, S_, U_, st_.descent_tol);
    E_ = energy_of(g_, ball_, U_, Lambda_);
    history_.assign(1, E_);
  }

  // Layer moves first; once they stall, single-node flips until those are
  // exhausted, then layer moves again. Returns true when neither helps.
  bool run() {
    std::deque<std::uint64_t> recent;
    bool layer_mode = true, layers_failed_here = false;
    for (int it = 0; it < st_.max_outer; ++it) {
      ++iterations_;
      bool moved = false;
      if (layer_mode) {
        moved = try_any(layer_proposals());
        if (!moved) {
          layer_mode = false;
          layers_failed_here = true;
        }
      }
      if (!moved) {
        moved = try_any(flip_proposals());
        if (!moved) {
          if (layers_failed_here) return true;
          layer_mode = true;
          continue;
        }
      }
      layers_failed_here = false;
      const std::uint64_t h = support_hash(S_);
      if (std::find(recent.begin(), recent.end(), h) != recent.end()) return false;
      recent.push_back(h);
      if (static_cast<int>(recent.size()) > st_.cycle_window) recent.pop_front();
    }
    return false;
  }

  void polish() {
    relax_all(g_, S_, U_, st_.final_tol);
    const double E = energy_of(g_, ball_, U_, Lambda_);
    if (E <= history_.back()) history_.push_back(E);
    E_ = E;
  }

  const std::vector<std::uint8_t>& support() const { return S_; }
  const Components& values() const { return U_; }
  const std::vector<double>& history() const { return history_; }
  int iterations() const { return iterations_; }

 private:
  std::size_t dims() const { return static_cast<std::size_t>(g_.dim()); }

  // Squared one-sided gradient: per axis the larger of the two differences.
  double g2(std::size_t x) const {
    double s = 0.0;
    for (int a = 0; a < g_.dim(); ++a) {
      const std::size_t st = g_.stride(a);
      double lo = 0.0, hi = 0.0;
      for (const auto& u : U_) {
        lo += (u[x] - u[x - st]) * (u[x] - u[x - st]);
        hi += (u[x + st] - u[x]) * (u[x + st] - u[x]);
      }
      s += std::max(lo, hi);
    }
    return s / (g_.h() * g_.h());
  }

  std::vector<Proposal> layer_proposals() const {
    std::vector<std::uint8_t> add_flag(g_.size(), 0);
    Proposal all, strong;
    std::vector<std::uint8_t> strong_add(g_.size(), 0);
    for (std::size_t x = 0; x < g_.size(); ++x) {
      if (!S_[x]) continue;
      bool edge = false;
      g_.for_each_neighbor(x, [&](std::size_t y) { edge = edge || is_zero(U_, y); });
      const double q = g2(x);
      if (edge && q < Lambda_) {
        all.remove.push_back(x);
        if (q < 0.5 * Lambda_) strong.remove.push_back(x);
      }
      if (q > Lambda_) {
        g_.for_each_neighbor(x, [&](std::size_t y) {
          if (ball_[y] && !S_[y]) {
            add_flag[y] = 1;
            if (q > 2.0 * Lambda_) strong_add[y] = 1;
          }
        });
      }
    }
    for (std::size_t y = 0; y < g_.size(); ++y) {
      if (add_flag[y]) all.add.push_back(y);
      if (strong_add[y]) strong.add.push_back(y);
    }
    std::vector<Proposal> out;
    if (all.empty()) return out;
    out.push_back(all);
    if (!all.remove.empty() && !all.add.empty()) {
      out.push_back({all.remove, {}});
      out.push_back({{}, all.add});
    }
    if (!strong.empty() && (strong.remove.size() + strong.add.size() < all.remove.size() + all.add.size())) {
      out.push_back(strong);
    }
    for (int par = 0; par < 2; ++par) {
      Proposal half;
      for (std::size_t x : all.remove) if (parity(g_, x) == par) half.remove.push_back(x);
      for (std::size_t y : all.add) if (parity(g_, y) == par) half.add.push_back(y);
      if (!half.empty()) out.push_back(half);
    }
    return out;
  }

  // Single-node flips that lower the energy with all other values frozen; nodes
  // of equal parity share no edge, so each parity batch lowers it too.
  std::vector<Proposal> flip_proposals() const {
    const double h2 = g_.h() * g_.h();
    const double two_d = 2.0 * g_.dim();
    Proposal batch[2];
    for (std::size_t x = 0; x < g_.size(); ++x) {
      if (!ball_[x]) continue;
      if (S_[x]) {
        const double m = sq_norm(U_, x);
        if (m > 0.0 && two_d * m < Lambda_ * h2) batch[parity(g_, x)].remove.push_back(x);
      } else {
        double s2 = 0.0;
        for (const auto& u : U_) {
          double s = 0.0;
          g_.for_each_neighbor(x, [&](std::size_t y) { s += u[y]; });
          s2 += s * s;
        }
        if (s2 > two_d * Lambda_ * h2) batch[parity(g_, x)].add.push_back(x);
      }
    }
    std::vector<Proposal> out;
    for (auto& b : batch) {
      if (!b.empty()) out.push_back(std::move(b));
    }
    return out;
  }

  bool try_any(const std::vector<Proposal>& ps) {
    for (const Proposal& p : ps) {
      if (try_accept(p)) return true;
    }
    return false;
  }

  bool try_accept(const Proposal& p) {
    std::vector<std::uint8_t> S = S_;
    Components U = U_;
    for (std::size_t x : p.remove) {
      S[x] = 0;
      for (auto& u : U) u[x] = 0.0;
    }
    for (std::size_t y : p.add) {
      S[y] = 1;
      for (std::size_t j = 0; j < U.size(); ++j) {
        double s = 0.0;
        g_.for_each_neighbor(y, [&](std::size_t z) { s += U_[j][z]; });
        U[j][y] = s / (2.0 * static_cast<double>(dims()));
      }
    }
    relax_all(g_, S, U, st_.descent_tol);
    const double E = energy_of(g_, ball_, U, Lambda_);
    if (!(E < E_ - 1e-13 * std::abs(E_))) return false;
    S_ = std::move(S);
    U_ = std::move(U);
    E_ = E;
    history_.push_back(E);
    return true;
  }

  Grid g_;
  std::vector<std::uint8_t> ball_;
  Components data_;
  double Lambda_;
  FbSettings st_;
  std::vector<std::uint8_t> S_;
  Components U_;
  double E_ = 0.0;
  std::vector<double> history_;
  int iterations_ = 0;
};

}  // namespace

double fb_energy(const std::vector<std::span<const double>>& components, const Grid& grid, double Lambda) {
  Components U;
  for (auto c : components) U.emplace_back(c.begin(), c.end());
  return energy_of(grid, ball_flags(grid), U, Lambda);
}

double fb_energy(const VectorField& U, double Lambda) {
  std::vector<std::span<const double>> c;
  for (const auto& f : U.components()) c.push_back(f.values());
  return fb_energy(c, U.grid(), Lambda);
}

double fb_energy(const ScalarField& u, double Lambda) { return fb_energy({u.values()}, u.grid(), Lambda); }

std::vector<std::vector<double>> solve_on_support(const Grid& grid, const std::vector<std::uint8_t>& support,
                                                  const VectorField& data, double tol) {
  Components U = data_on(data, grid);
  std::vector<std::uint8_t> S(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) S[i] = (support[i] && grid.in_unit_ball(i)) ? 1 : 0;
  relax_all(grid, S, U, tol);
  return U;
}

std::vector<int> fb_levels(int n, int coarsest) {
  std::vector<int> lv{n};
  int m = n;
  while ((m - 1) % 2 == 0 && (m - 1) / 2 + 1 >= coarsest && ((m - 1) / 2) % 2 == 0) {
    m = (m - 1) / 2 + 1;
    lv.push_back(m);
  }
  std::reverse(lv.begin(), lv.end());
  return lv;
}

FbSolution minimize(const FbProblem& problem) {
  const VectorField& data = problem.boundary_data;
  const Grid& fine = data.grid();
  if (!(problem.Lambda > 0.0)) throw Error("minimize: Lambda must be positive");
  bool nonzero = false;
  for (const auto& c : data.components()) {
    for (std::size_t i = 0; i < fine.size(); ++i) nonzero = nonzero || (!fine.in_unit_ball(i) && c[i] != 0.0);
  }
  if (!nonzero) throw Error("minimize: boundary data vanish identically");

  std::optional<Descent> prev;
  std::optional<Grid> prev_grid;
  bool converged = false;
  int iterations = 0;
  for (int n : fb_levels(fine.n(), problem.settings.coarsest_n)) {
    const Grid g(fine.dim(), n);
    Descent level(g, data_on(data, g), problem.Lambda, problem.settings);
    std::vector<std::uint8_t> S(g.size(), 0);
    Components U(data.k(), std::vector<double>(g.size(), 0.0));
    if (!prev) {
      for (std::size_t i = 0; i < g.size(); ++i) S[i] = g.in_unit_ball(i) ? 1 : 0;
    } else {
      std::vector<ScalarField> coarse;
      for (const auto& u : prev->values()) coarse.emplace_back(*prev_grid, u, Role::auxiliary);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_unit_ball(i)) continue;
        const Point x = g.coords(i);
        double m = 0.0;
        for (std::size_t j = 0; j < coarse.size(); ++j) {
          U[j][i] = coarse[j].sample(x);
          m += U[j][i] * U[j][i];
        }
        S[i] = m > 0.0 ? 1 : 0;
      }
    }
    level.start(std::move(S), std::move(U));
    converged = level.run();
    iterations = level.iterations();
    prev.emplace(std::move(level));
    prev_grid.emplace(g);
  }
  prev->polish();

  std::vector<ScalarField> comps;
  for (const auto& u : prev->values()) comps.emplace_back(fine, u, Role::auxiliary);
  VectorField U(std::move(comps));
  ScalarField phi = make_state(fine, U.modulus());
  return {std::move(U), prev->history(), std::move(phi), converged, iterations};
}

namespace {

double cutoff(const Grid& g, std::size_t i) {
  const double r_out = 1.0 - 2.0 * g.h();
  const double r_in = r_out - std::max(0.1, 4.0 * g.h());
  return std::clamp((r_out - g.norm(i)) / (r_out - r_in), 0.0, 1.0);
}

}  // namespace

SubSuperResult sub_super_check(const ScalarField& u, double lambda, double Lambda, int trials, std::uint64_t seed) {
  if (lambda > Lambda) throw Error("sub_super_check: need lambda <= Lambda");
  if (!(lambda > 0.0)) throw Error("sub_super_check: lambda must be positive");
  if (u.role() != Role::state) throw Error("sub_super_check: u must have role 'state'");
  const Grid& g = u.grid();
  const double h = g.h();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> chi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) chi[i] = cutoff(g, i);

  double L = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_unit_ball(i)) continue;
    g.for_each_neighbor(i, [&](std::size_t j) {
      if (g.in_unit_ball(j)) L = std::max(L, std::abs(u[i] - u[j]) / h);
    });
  }
  const double umax = u.max_value();

  // Outside nodes touching the support, where chi > 0.
  std::vector<std::size_t> rim, layer;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (chi[i] <= 0.0) continue;
    bool touches_pos = false, touches_zero = false;
    g.for_each_neighbor(i, [&](std::size_t j) {
      touches_pos = touches_pos || u[j] > 0.0;
      touches_zero = touches_zero || u[j] == 0.0;
    });
    if (u[i] == 0.0 && touches_pos) rim.push_back(i);
    if (u[i] > 0.0 && touches_zero) layer.push_back(i);
  }

  SubSuperResult res;
  res.seed = seed;
  res.trials = trials;
  const double Fu_up = fb_energy(u, Lambda);
  const double Fu_down = fb_energy(u, lambda);
  res.tol_E = 1e-9 * std::max({1.0, std::abs(Fu_up), std::abs(Fu_down)});

  auto pick = [&](const std::vector<std::size_t>& v) { return v[static_cast<std::size_t>(unit(rng) * v.size()) % v.size()]; };

  for (int t = 0; t < trials; ++t) {
    const int family = t % 6;
    std::vector<double> v(u.values().begin(), u.values().end());
    Competitor c;
    switch (family) {
      case 0: {  // truncation (u - s)^+
        const double s = unit(rng) * 0.5 * umax;
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = u[i] - chi[i] * std::min(u[i], s);
        c = {"truncation", false, s, 0, 0};
        break;
      }
      case 1: {  // multiplicative cut (1 - t) u
        const double s = unit(rng);
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = (1.0 - s * chi[i]) * u[i];
        c = {"cut", false, s, 0, 0};
        break;
      }
      case 2: {  // local erosion of the support boundary layer
        if (layer.empty()) continue;
        const Point ctr = g.coords(pick(layer));
        const double rad = 2.0 * h + unit(rng) * 0.3;
        for (std::size_t i : layer) {
          if (distance(g.coords(i), ctr, g.dim()) < rad) v[i] = (1.0 - chi[i]) * u[i];
        }
        c = {"erosion", false, rad, 0, 0};
        break;
      }
      case 3: {  // smooth bump
        if (rim.empty()) continue;
        const Point ctr = g.coords(pick(rim));
        const double rad = 2.0 * h + unit(rng) * 0.2;
        const double amp = unit(rng) * std::max(L, 1.0) * rad * 0.5;
        g.for_each_in_ball(ctr, rad, [&](std::size_t i) {
          const double q = distance(g.coords(i), ctr, g.dim()) / rad;
          v[i] = u[i] + amp * chi[i] * (1.0 - q * q);
        });
        c = {"bump", true, amp, 0, 0};
        break;
      }
      case 4: {  // local dilation by one cell
        if (rim.empty()) continue;
        const Point ctr = g.coords(pick(rim));
        const double rad = 2.0 * h + unit(rng) * 0.3;
        const double amp = unit(rng) * 2.0 * h * std::max(L, 1.0);
        for (std::size_t i : rim) {
          if (distance(g.coords(i), ctr, g.dim()) < rad) v[i] = u[i] + amp * chi[i];
        }
        c = {"dilation", true, amp, 0, 0};
        break;
      }
      default: {  // multiplicative growth (1 + t) u
        const double s = unit(rng) * 0.5;
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = (1.0 + s * chi[i]) * u[i];
        c = {"growth", true, s, 0, 0};
        break;
      }
    }
    const ScalarField vf(g, std::move(v), Role::state);
    if (c.upward) {
      ++res.upward_tested;
      c.energy_u = Fu_up;
      c.energy_v = fb_energy(vf, Lambda);
    } else {
      ++res.downward_tested;
      c.energy_u = Fu_down;
      c.energy_v = fb_energy(vf, lambda);
    }
    if (c.energy_u > c.energy_v + res.tol_E) {
      const double gain = c.energy_u - c.energy_v;
      if (!res.certificate || gain > res.certificate->energy_u - res.certificate->energy_v) {
        res.certificate = c;
        res.certificate_field = vf;
      }
      res.pass = false;
    }
  }
  return res;
}

}  // namespace harnack
