#include "harnacklab/harmonic.hpp"

#include <numbers>
#include <sstream>

#include "harnacklab/parallel.hpp"

namespace harnack {

HarmonicField::HarmonicField(ScalarField field, DomainMask mask, double residual)
    : field_(std::move(field)), mask_(std::move(mask)), residual_(residual) {
  if (!(field_.grid() == mask_.grid())) throw Error("harmonic field and mask live on different grids");
}

namespace {

double node_laplacian(const Grid& g, std::span<const double> v, std::size_t i) {
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t st = g.stride(a);
    s += v[i - st] + v[i + st];
  }
  return s - 2.0 * g.dim() * v[i];
}

}  // namespace

double laplacian_residual(const Grid& grid, std::span<const std::uint8_t> unknown, std::span<const double> values) {
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (unknown[i]) worst = std::max(worst, std::abs(node_laplacian(grid, values, i)) * inv_h2);
  }
  return worst;
}

RelaxStats relax_in_place(const Grid& grid, std::span<const std::uint8_t> unknown, std::span<double> values,
                          const SolverSettings& settings) {
  std::vector<std::size_t> color[2];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!unknown[i]) continue;
    if (!grid.has_all_neighbors(i)) throw Error("unknown node on the box boundary");
    const Index idx = grid.multi_index(i);
    color[(idx[0] + idx[1] + idx[2]) & 1].push_back(i);
  }
  RelaxStats stats;
  if (color[0].empty() && color[1].empty()) return stats;

  const double omega =
      settings.omega > 0.0 ? settings.omega : 2.0 / (1.0 + std::sin(std::numbers::pi / (grid.n() - 1)));
  const int dim = grid.dim();
  const double inv_2d = 1.0 / (2.0 * dim);
  std::array<std::size_t, 3> strides{grid.stride(0), grid.stride(1), dim == 3 ? grid.stride(2) : 0};

  auto sweep_color = [&](const std::vector<std::size_t>& nodes, double w) {
    parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t i = nodes[k];
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += values[i - strides[static_cast<std::size_t>(a)]] +
                                           values[i + strides[static_cast<std::size_t>(a)]];
        values[i] += w * (s * inv_2d - values[i]);
      }
    });
  };

  constexpr int check_every = 8;
  stats.residual = laplacian_residual(grid, unknown, values);
  while (stats.residual > settings.tol) {
    if (stats.sweeps >= settings.max_sweeps) {
      std::ostringstream msg;
      msg << "harmonic solve did not converge in " << stats.sweeps << " sweeps (residual " << stats.residual
          << ", tol " << settings.tol << ")";
      throw SolverError(msg.str(), stats.residual);
    }
    for (int s = 0; s < check_every; ++s) {
      sweep_color(color[0], omega);
      sweep_color(color[1], omega);
    }
    stats.sweeps += check_every;
    stats.residual = laplacian_residual(grid, unknown, values);
  }
  return stats;
}

HarmonicField solve(const DirichletProblem& problem) {
  const DomainMask& mask = problem.mask;
  const Grid& g = mask.grid();
  if (!(problem.boundary_data.grid() == g)) throw Error("boundary data and mask live on different grids");
  if (mask.count() == 0) throw Error("empty domain");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask.inside(i)) continue;
    lo = std::min(lo, problem.boundary_data[i]);
    hi = std::max(hi, problem.boundary_data[i]);
  }
  if (problem.settings.require_nonnegative && lo < 0.0) throw Error("boundary data must be nonnegative");

  std::vector<double> v(problem.boundary_data.values().begin(), problem.boundary_data.values().end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask.inside(i)) v[i] = std::clamp(v[i], lo, hi);
  }
  RelaxStats stats;
  for (int attempt = 0;; ++attempt) {
    stats = relax_in_place(g, mask.flags(), v, problem.settings);
    // Projecting onto [lo, hi] only moves values toward the exact solution, which
    // obeys the discrete maximum principle.
    bool clamped = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!mask.inside(i)) continue;
      const double c = std::clamp(v[i], lo, hi);
      clamped = clamped || c != v[i];
      v[i] = c;
    }
    if (!clamped) break;
    stats.residual = laplacian_residual(g, mask.flags(), v);
    if (stats.residual <= problem.settings.tol || attempt > 3) break;
  }
  return {ScalarField(g, std::move(v), Role::harmonic), mask, stats.residual};
}

double residual(const HarmonicField& field) {
  return laplacian_residual(field.grid(), field.mask().flags(), field.field().values());
}

double mean_value_check(const HarmonicField& field, std::size_t x0, double r) {
  const Grid& g = field.grid();
  double sum = 0.0;
  std::size_t count = 0;
  bool contained = true;
  g.for_each_in_ball(g.coords(x0), r, [&](std::size_t j) {
    contained = contained && field.mask().inside(j);
    sum += field[j];
    ++count;
  });
  if (!contained || count == 0) throw Error("ball is not contained in the domain");
  return std::abs(sum / static_cast<double>(count) - field[x0]);
}

ScalarField sphere_data(const Grid& grid, const std::function<double(const Point&)>& g) {
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.in_unit_ball(i)) v[i] = g(grid.coords(i));
  }
  return {grid, std::move(v), Role::auxiliary};
}

HarmonicField solve_with_sphere_data(const DomainMask& mask, const std::function<double(const Point&)>& g,
                                     const SolverSettings& settings) {
  return solve({mask, sphere_data(mask.grid(), g), settings});
}

}  // namespace harnack
