#pragma once

#include <string>
#include <vector>

#include "harnacklab/grid.hpp"

namespace harnack::builtins {

/// slope * max(x_d, 0).
ScalarField halfspace(const Grid& grid, double slope = 1.0);
/// max(x_d, 0)^2, degenerate at the flat boundary.
ScalarField halfspace_squared(const Grid& grid);
/// (radius - |x|)^+ : Omega is the centered ball of the given radius.
ScalarField ball(const Grid& grid, double radius = 0.5);
/// 2 x_1 x_2 on the quarter-plane sector {x_1 > 0, x_2 > 0} (extended trivially in 3D).
ScalarField sector(const Grid& grid);
/// min(x_d - 0.1, 0.4 - |x - c_i|)^+ on two separated balls c_i = (±0.55, .., 0.45).
ScalarField two_bump(const Grid& grid);
/// max(x_d, (x_1 + x_d)/sqrt 2, 0): a 1-homogeneous convex cone.
ScalarField wedge(const Grid& grid);
/// min(max(x_d, 0), level): a plateau {phi = level} of positive measure.
ScalarField plateau(const Grid& grid, double level);
/// 1 - |x|^2 on the whole box, role auxiliary.
ScalarField paraboloid(const Grid& grid);

/// Lookup by name: halfspace, halfspace2, ball, sector, two-bump, wedge.
ScalarField by_name(const std::string& name, const Grid& grid);
std::vector<std::string> names();

}  // namespace harnack::builtins
