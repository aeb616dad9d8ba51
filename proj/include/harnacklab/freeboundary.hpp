#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/harmonic.hpp"

namespace harnack {

struct FbSettings {
  int max_outer = 400;
  /// Residual tolerance during the descent; the accepted iterate is re-solved at final_tol.
  double descent_tol = 1e-6;
  double final_tol = 1e-9;
  /// Coarsest grid of the coarse-to-fine ladder.
  int coarsest_n = 33;
  int cycle_window = 10;
};

/// Data is read on nodes with |x| >= 1; values inside B_1 are ignored.
struct FbProblem {
  double Lambda = 1.0;
  VectorField boundary_data;
  FbSettings settings{};
};

struct FbSolution {
  VectorField U;
  std::vector<double> energy_history;  // finest level, one entry per accepted iterate
  ScalarField phi;                     // |U|, role state
  bool converged = false;
  int iterations = 0;
};

/// Gradient energy by forward differences over edges with an endpoint in B_1,
/// plus Lambda h^d times the node count of {|U| > 0} ∩ B_1.
double fb_energy(const std::vector<std::span<const double>>& components, const Grid& grid, double Lambda);
double fb_energy(const VectorField& U, double Lambda);
double fb_energy(const ScalarField& u, double Lambda);

/// Harmonic components on the support (flags over nodes of B_1) with the
/// problem data outside; returns one value vector per component.
std::vector<std::vector<double>> solve_on_support(const Grid& grid, const std::vector<std::uint8_t>& support,
                                                  const VectorField& data, double tol);

FbSolution minimize(const FbProblem& problem);

/// Grids of the coarse-to-fine ladder ending at n.
std::vector<int> fb_levels(int n, int coarsest);

struct Competitor {
  std::string kind;
  bool upward = false;
  double parameter = 0.0;
  double energy_u = 0.0;
  double energy_v = 0.0;
};

struct SubSuperResult {
  bool pass = true;
  std::uint64_t seed = 0;
  int trials = 0;
  int upward_tested = 0;
  int downward_tested = 0;
  double tol_E = 0.0;
  std::optional<Competitor> certificate;
  std::optional<ScalarField> certificate_field;
};

/// Randomized ordered-competitor test. Upward competitors v >= u are compared
/// under F_Lambda, downward ones v <= u under F_lambda. Competitors only change
/// nodes with |x| < 1 - 2h, so the data near the sphere is kept.
SubSuperResult sub_super_check(const ScalarField& u, double lambda, double Lambda, int trials, std::uint64_t seed);

}  // namespace harnack
