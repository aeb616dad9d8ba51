#include "harnacklab/grid.hpp"

#include <limits>
#include <numeric>

namespace harnack {

double norm(const Point& x, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
  return std::sqrt(s);
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s);
}

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 2 && dim != 3) throw Error("grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (n < 9) throw Error("grid needs n >= 9 nodes per axis (under-resolved domain), got " + std::to_string(n));
  if (n % 2 == 0) throw Error("grid needs an odd node count so the origin is a node, got " + std::to_string(n));
  h_ = 2.0 / static_cast<double>(n - 1);
  const auto un = static_cast<std::size_t>(n);
  size_ = dim == 2 ? un * un : un * un * un;
  strides_[static_cast<std::size_t>(dim - 1)] = 1;
  for (int a = dim - 2; a >= 0; --a)
    strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a + 1)] * un;
}

Grid build_grid(int dim, int n) { return Grid(dim, n); }

std::size_t Grid::index(const Index& idx) const {
  std::size_t node = 0;
  for (int a = 0; a < dim_; ++a)
    node += static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) * stride(a);
  return node;
}

Index Grid::multi_index(std::size_t node) const {
  Index idx{0, 0, 0};
  const auto un = static_cast<std::size_t>(n_);
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(node % un);
    node /= un;
  }
  return idx;
}

Point Grid::coords(std::size_t node) const {
  const Index idx = multi_index(node);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = coordinate(idx[static_cast<std::size_t>(a)]);
  return x;
}

double Grid::norm(std::size_t node) const { return harnack::norm(coords(node), dim_); }

std::size_t Grid::origin() const {
  const int c = (n_ - 1) / 2;
  return index({c, dim_ >= 2 ? c : 0, dim_ == 3 ? c : 0});
}

std::optional<std::size_t> Grid::nearest_node(const Point& x) const {
  Index idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    const double v = x[static_cast<std::size_t>(a)];
    if (!(v >= -1.0 && v <= 1.0)) return std::nullopt;
    idx[static_cast<std::size_t>(a)] = std::clamp(static_cast<int>(std::lround((v + 1.0) / h_)), 0, n_ - 1);
  }
  return index(idx);
}

bool Grid::has_all_neighbors(std::size_t node) const {
  const Index idx = multi_index(node);
  for (int a = 0; a < dim_; ++a) {
    const int i = idx[static_cast<std::size_t>(a)];
    if (i == 0 || i == n_ - 1) return false;
  }
  return true;
}

std::string to_string(Role role) {
  switch (role) {
    case Role::state: return "state";
    case Role::harmonic: return "harmonic";
    case Role::auxiliary: return "auxiliary";
  }
  return "auxiliary";
}

Role role_from_string(const std::string& s) {
  if (s == "state") return Role::state;
  if (s == "harmonic") return Role::harmonic;
  if (s == "auxiliary") return Role::auxiliary;
  throw Error("unknown field role '" + s + "'");
}

ScalarField::ScalarField(Grid grid, std::vector<double> values, Role role)
    : grid_(grid), values_(std::move(values)), role_(role) {
  if (values_.size() != grid_.size())
    throw Error("field has " + std::to_string(values_.size()) + " values, grid needs " +
                std::to_string(grid_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw Error("non-finite field value at node " + std::to_string(i));
  }
  if (role_ == Role::state) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < 0.0) throw Error("state field is negative at node " + std::to_string(i));
      if (values_[i] != 0.0 && !grid_.in_unit_ball(i))
        throw Error("state field must vanish outside B_1 (node " + std::to_string(i) + ")");
    }
  }
}

double ScalarField::sample(const Point& x) const {
  const int d = grid_.dim();
  const int n = grid_.n();
  const double h = grid_.h();
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double t = (x[ua] + 1.0) / h;
    if (!(t >= -1e-9 && t <= (n - 1) + 1e-9)) throw Error("sample point outside the grid box");
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, n - 2);
    base[ua] = i;
    frac[ua] = std::clamp(t - i, 0.0, 1.0);
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    Index idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const int bit = (c >> a) & 1;
      idx[ua] = base[ua] + bit;
      w *= bit ? frac[ua] : 1.0 - frac[ua];
    }
    if (w != 0.0) acc += w * values_[grid_.index(idx)];
  }
  return acc;
}

double ScalarField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField ScalarField::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return {grid_, std::move(v), role_};
}

ScalarField make_state(const Grid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw Error("state values do not match the grid");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!grid.in_unit_ball(i)) values[i] = 0.0;
  }
  return {grid, std::move(values), Role::state};
}

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error("vector field needs at least one component");
  for (const auto& c : components_) {
    if (!(c.grid() == components_.front().grid())) throw Error("vector field components live on different grids");
  }
}

std::vector<double> VectorField::modulus() const {
  std::vector<double> m(grid().size(), 0.0);
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += c[i] * c[i];
  }
  for (double& v : m) v = std::sqrt(v);
  return m;
}

DomainMask::DomainMask(Grid grid, std::vector<std::uint8_t> inside) : grid_(grid), inside_(std::move(inside)) {
  if (inside_.size() != grid_.size()) throw Error("mask size does not match the grid");
  std::vector<std::uint8_t> is_bnd(inside_.size(), 0);
  for (std::size_t i = 0; i < inside_.size(); ++i) {
    if (!inside_[i]) continue;
    if (!grid_.in_unit_ball(i)) throw Error("mask marks a node with |x| >= 1 as inside");
    ++count_;
  }
  for (std::size_t i = 0; i < inside_.size(); ++i) {
    if (inside_[i] || !grid_.in_unit_ball(i)) continue;
    bool touches = false;
    grid_.for_each_neighbor(i, [&](std::size_t j) { touches = touches || inside_[j]; });
    if (touches) boundary_.push_back(i);
  }
}

bool DomainMask::is_boundary(std::size_t node) const {
  return std::binary_search(boundary_.begin(), boundary_.end(), node);
}

DomainMask mask_from_state(const ScalarField& phi) {
  if (phi.role() != Role::state) throw Error("mask_from_state needs a field with role 'state'");
  const Grid& g = phi.grid();
  std::vector<std::uint8_t> inside(g.size(), 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (phi[i] > 0.0 && g.in_unit_ball(i)) {
      inside[i] = 1;
      ++count;
    }
  }
  if (count == 0) throw Error("empty domain");
  return {g, std::move(inside)};
}

namespace {

// One-dimensional lower envelope of parabolas (Felzenszwalb & Huttenlocher).
// f holds squared distances in index units; +inf marks "no feature".
void edt_1d(std::span<double> f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)]) {
        if (--k < 0) break;
      } else {
        break;
      }
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[static_cast<std::size_t>(q)] = inf;
  } else {
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
      const int p = v[static_cast<std::size_t>(j)];
      d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
  }
  for (int q = 0; q < n; ++q) f[static_cast<std::size_t>(q)] = d[static_cast<std::size_t>(q)];
}

}  // namespace

ScalarField distance_transform(const DomainMask& mask) {
  const Grid& g = mask.grid();
  const int dim = g.dim();
  const auto n = static_cast<std::size_t>(g.n());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sq[i] = mask.inside(i) ? inf : 0.0;

  std::vector<double> line(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int axis = 0; axis < dim; ++axis) {
    const std::size_t s = g.stride(axis);
    for (std::size_t start = 0; start < g.size(); ++start) {
      // visit each line along `axis` once, from its first node
      if ((start / s) % n != 0) continue;
      for (std::size_t q = 0; q < n; ++q) line[q] = sq[start + q * s];
      edt_1d(line, d, v, z);
      for (std::size_t q = 0; q < n; ++q) sq[start + q * s] = line[q];
    }
  }
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask.inside(i)) out[i] = std::sqrt(sq[i]) * g.h();
  }
  return {g, std::move(out), Role::auxiliary};
}

ScalarField rescale_field(const ScalarField& phi, std::size_t x0, double r, int n_out) {
  const Grid& g = phi.grid();
  if (x0 >= g.size()) throw Error("rescale center is not a grid node");
  const double rho = g.norm(x0);
  if (!(r > 0.0 && r < 1.0 - rho)) throw Error("rescale radius out of range (need 0 < r < 1 - |x0|)");
  if (phi.role() == Role::state) {
    if (phi[x0] != 0.0) throw Error("rescale center must satisfy phi(x0) = 0");
    if (!mask_from_state(phi).is_boundary(x0)) throw Error("rescale center must be a boundary node");
  }
  const Grid out_grid(g.dim(), n_out);
  const Point c = g.coords(x0);
  std::vector<double> vals(out_grid.size(), 0.0);
  for (std::size_t i = 0; i < out_grid.size(); ++i) {
    if (phi.role() == Role::state && !out_grid.in_unit_ball(i)) continue;
    const Point x = out_grid.coords(i);
    Point y{0.0, 0.0, 0.0};
    bool in_box = true;
    for (int a = 0; a < g.dim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      y[ua] = c[ua] + r * x[ua];
      in_box = in_box && y[ua] >= -1.0 && y[ua] <= 1.0;
    }
    vals[i] = in_box ? phi.sample(y) / r : 0.0;
  }
  return {out_grid, std::move(vals), phi.role()};
}

}  // namespace harnack
