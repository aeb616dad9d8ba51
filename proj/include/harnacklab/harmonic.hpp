#pragma once

#include <functional>
#include <span>

#include "harnacklab/grid.hpp"

namespace harnack {

struct SolverSettings {
  /// Max-norm bound on the discrete Laplacian at unknown nodes.
  double tol = 1e-8;
  int max_sweeps = 200000;
  /// Over-relaxation factor; 0 selects the optimal value for the box.
  double omega = 0.0;
  bool require_nonnegative = false;
};

/// Unknowns are the mask's inside nodes; every other node keeps its boundary_data value.
struct DirichletProblem {
  DomainMask mask;
  ScalarField boundary_data;
  SolverSettings settings{};
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual) : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

class HarmonicField {
 public:
  HarmonicField(ScalarField field, DomainMask mask, double residual);

  const ScalarField& field() const { return field_; }
  const DomainMask& mask() const { return mask_; }
  const Grid& grid() const { return field_.grid(); }
  double residual() const { return residual_; }
  double operator[](std::size_t node) const { return field_[node]; }

 private:
  ScalarField field_;
  DomainMask mask_;
  double residual_;
};

struct RelaxStats {
  double residual = 0.0;
  int sweeps = 0;
};

/// Red-black SOR on the flagged nodes of `values`, in place, until the max-norm
/// Laplacian residual is below settings.tol. Flagged nodes need all face neighbors.
RelaxStats relax_in_place(const Grid& grid, std::span<const std::uint8_t> unknown, std::span<double> values,
                          const SolverSettings& settings);

/// max over flagged nodes of |sum of face neighbors - 2d f(x)| / h^2.
double laplacian_residual(const Grid& grid, std::span<const std::uint8_t> unknown, std::span<const double> values);

HarmonicField solve(const DirichletProblem& problem);

/// Recomputed residual of a stored solution.
double residual(const HarmonicField& field);

/// |mean of f over the nodes of B_r(x0) - f(x0)|; the ball must lie in Omega.
double mean_value_check(const HarmonicField& field, std::size_t x0, double r);

/// Boundary data equal to g on nodes with |x| >= 1 and 0 elsewhere.
ScalarField sphere_data(const Grid& grid, const std::function<double(const Point&)>& g);

/// Solve with data g on |x| >= 1 and 0 on B_1 \ Omega.
HarmonicField solve_with_sphere_data(const DomainMask& mask, const std::function<double(const Point&)>& g,
                                     const SolverSettings& settings = {});

}  // namespace harnack
