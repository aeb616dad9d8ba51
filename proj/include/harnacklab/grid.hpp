#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harnack {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of R^d stored in three slots; unused slots are zero.
using Point = std::array<double, 3>;
/// Per-axis node indices; unused slots are zero.
using Index = std::array<int, 3>;

double norm(const Point& x, int dim);
double distance(const Point& a, const Point& b, int dim);

/**
 * Uniform Cartesian grid over [-1,1]^d with n nodes per axis.
 *
 * n is odd so that the origin is a node. Nodes are stored row-major with the
 * last axis fastest, so in 2D the flat index is i0*n + i1 and axis 1 is x_d.
 */
class Grid {
 public:
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  std::size_t index(const Index& idx) const;
  Index multi_index(std::size_t node) const;
  double coordinate(int i) const { return -1.0 + h_ * i; }
  Point coords(std::size_t node) const;
  double norm(std::size_t node) const;
  /// Strict membership |x| < 1.
  bool in_unit_ball(std::size_t node) const { return norm(node) < 1.0; }
  std::size_t origin() const;

  /// Node closest to x (ties resolved toward lower indices); nullopt outside the box.
  std::optional<std::size_t> nearest_node(const Point& x) const;

  /// Calls f(neighbor) for every face neighbor that exists in the box.
  template <class F>
  void for_each_neighbor(std::size_t node, F&& f) const {
    const Index idx = multi_index(node);
    for (int a = 0; a < dim_; ++a) {
      const std::size_t s = stride(a);
      if (idx[static_cast<std::size_t>(a)] > 0) f(node - s);
      if (idx[static_cast<std::size_t>(a)] < n_ - 1) f(node + s);
    }
  }

  /// True when all 2d face neighbors exist in the box.
  bool has_all_neighbors(std::size_t node) const;

  /// Calls f(node) for each node y with |y - center| < r (strict).
  template <class F>
  void for_each_in_ball(const Point& center, double r, F&& f) const {
    Index lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      lo[ua] = std::max(0, static_cast<int>(std::floor((center[ua] - r + 1.0) / h_)));
      hi[ua] = std::min(n_ - 1, static_cast<int>(std::ceil((center[ua] + r + 1.0) / h_)));
    }
    const double r2 = r * r;
    Index idx{0, 0, 0};
    for (idx[0] = lo[0]; idx[0] <= hi[0]; ++idx[0]) {
      const double d0 = coordinate(idx[0]) - center[0];
      for (idx[1] = lo[1]; idx[1] <= hi[1]; ++idx[1]) {
        const double d1 = coordinate(idx[1]) - center[1];
        const double s01 = d0 * d0 + d1 * d1;
        if (dim_ == 2) {
          if (s01 < r2) f(index(idx));
          continue;
        }
        for (idx[2] = lo[2]; idx[2] <= hi[2]; ++idx[2]) {
          const double d2 = coordinate(idx[2]) - center[2];
          if (s01 + d2 * d2 < r2) f(index(idx));
        }
      }
    }
  }

  bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_;
  int n_;
  double h_;
  std::size_t size_;
  std::array<std::size_t, 3> strides_{};
};

Grid build_grid(int dim, int n);

enum class Role { state, harmonic, auxiliary };
std::string to_string(Role role);
Role role_from_string(const std::string& s);

/// Immutable real-valued field on a grid. Values are finite; a `state` field is
/// nonnegative and vanishes at every node with |x| >= 1.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values, Role role);

  const Grid& grid() const { return grid_; }
  Role role() const { return role_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

  /// Multilinear interpolation; x must lie in the closed box.
  double sample(const Point& x) const;
  double max_value() const;
  ScalarField with_role(Role role) const { return {grid_, values_, role}; }
  ScalarField scaled(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  Role role_;
};

/// Builds a `state` field from arbitrary values by zeroing nodes with |x| >= 1.
/// Negative values inside the ball are rejected.
ScalarField make_state(const Grid& grid, std::vector<double> values);

class VectorField {
 public:
  explicit VectorField(std::vector<ScalarField> components);
  const Grid& grid() const { return components_.front().grid(); }
  std::size_t k() const { return components_.size(); }
  const ScalarField& operator[](std::size_t j) const { return components_[j]; }
  const std::vector<ScalarField>& components() const { return components_; }
  /// Pointwise Euclidean norm |U|.
  std::vector<double> modulus() const;

 private:
  std::vector<ScalarField> components_;
};

/// The open set Omega = {phi > 0} ∩ B_1 as node flags, with the outside nodes of
/// B_1 that touch it through a face.
class DomainMask {
 public:
  DomainMask(Grid grid, std::vector<std::uint8_t> inside);

  const Grid& grid() const { return grid_; }
  bool inside(std::size_t node) const { return inside_[node] != 0; }
  std::span<const std::uint8_t> flags() const { return inside_; }
  std::span<const std::size_t> boundary_nodes() const { return boundary_; }
  std::size_t count() const { return count_; }
  bool is_boundary(std::size_t node) const;

 private:
  Grid grid_;
  std::vector<std::uint8_t> inside_;
  std::vector<std::size_t> boundary_;
  std::size_t count_ = 0;
};

DomainMask mask_from_state(const ScalarField& phi);

/// Exact Euclidean distance from each inside node to the nearest non-inside node.
ScalarField distance_transform(const DomainMask& mask);

/// phi_{r,x0}(x) = phi(x0 + r x) / r sampled on a fresh grid of n_out nodes per axis.
ScalarField rescale_field(const ScalarField& phi, std::size_t x0, double r, int n_out);

}  // namespace harnack
