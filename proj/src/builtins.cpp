#include "harnacklab/builtins.hpp"

#include <functional>

namespace harnack::builtins {

namespace {

ScalarField from_function(const Grid& grid, const std::function<double(const Point&)>& f) {
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.in_unit_ball(i)) v[i] = std::max(0.0, f(grid.coords(i)));
  }
  return make_state(grid, std::move(v));
}

double last(const Point& x, int dim) { return x[static_cast<std::size_t>(dim - 1)]; }

}  // namespace

ScalarField halfspace(const Grid& grid, double slope) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) { return slope * std::max(last(x, d), 0.0); });
}

ScalarField halfspace_squared(const Grid& grid) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) {
    const double t = std::max(last(x, d), 0.0);
    return t * t;
  });
}

ScalarField ball(const Grid& grid, double radius) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) { return radius - norm(x, d); });
}

ScalarField sector(const Grid& grid) {
  return from_function(grid, [](const Point& x) { return x[0] > 0.0 && x[1] > 0.0 ? 2.0 * x[0] * x[1] : 0.0; });
}

ScalarField two_bump(const Grid& grid) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) {
    double best = 0.0;
    for (double sx : {-0.55, 0.55}) {
      Point c{sx, 0.0, 0.0};
      c[static_cast<std::size_t>(d - 1)] = 0.45;
      best = std::max(best, std::min(last(x, d) - 0.1, 0.4 - distance(x, c, d)));
    }
    return best;
  });
}

ScalarField wedge(const Grid& grid) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) {
    const double xd = last(x, d);
    return std::max(xd, (x[0] + xd) / std::sqrt(2.0));
  });
}

ScalarField plateau(const Grid& grid, double level) {
  const int d = grid.dim();
  return from_function(grid, [=](const Point& x) { return std::min(std::max(last(x, d), 0.0), level); });
}

ScalarField paraboloid(const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.norm(i);
    v[i] = 1.0 - r * r;
  }
  return {grid, std::move(v), Role::auxiliary};
}

ScalarField by_name(const std::string& name, const Grid& grid) {
  if (name == "halfspace") return halfspace(grid);
  if (name == "halfspace2") return halfspace_squared(grid);
  if (name == "ball") return ball(grid);
  if (name == "sector") return sector(grid);
  if (name == "two-bump") return two_bump(grid);
  if (name == "wedge") return wedge(grid);
  throw Error("unknown builtin domain '" + name + "'");
}

std::vector<std::string> names() { return {"halfspace", "halfspace2", "ball", "sector", "two-bump", "wedge"}; }

}  // namespace harnack::builtins
