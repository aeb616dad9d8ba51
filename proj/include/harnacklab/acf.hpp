#pragma once

#include <vector>

#include "harnacklab/grid.hpp"

namespace harnack {

struct AcfProfile {
  std::vector<double> radii;
  std::vector<double> phi_values;
  std::vector<double> alpha_values;
  /// max_k ln Phi(r_k) - ln Phi(r_{k+1}); NaN when some Phi(r_k) = 0.
  double monotone_defect = 0.0;
};

/// (phi - level)^+ on the component of {phi > level} containing seed, 0 elsewhere.
ScalarField truncate_component(const ScalarField& phi, double level, std::size_t seed);

/// Dirichlet integral of psi over B_r weighted by 1/max(|x|, h)^(d-2).
/// Each face edge contributes ((psi(b) - psi(a))/h)^2 h^d at its midpoint.
double weighted_dirichlet(const ScalarField& psi, double r);

AcfProfile acf_phi(const ScalarField& psi1, const ScalarField& psi2, const std::vector<double>& radii);

struct MonotoneVerdict {
  bool pass = false;
  double monotone_defect = 0.0;
  /// Pearson correlation between per-step growth of ln Phi and alpha(r_k); NaN if undefined.
  double growth_alpha_correlation = 0.0;
  /// Least-squares slope of ln Phi against ln r.
  double log_slope = 0.0;
};

MonotoneVerdict check_monotone(const AcfProfile& profile, double tol);

/// Radii geometrically spaced between r_min and r_max inclusive.
std::vector<double> geometric_radii(double r_min, double r_max, int count);

}  // namespace harnack
