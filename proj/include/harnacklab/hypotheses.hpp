#pragma once

#include <map>
#include <string>
#include <vector>

#include "harnacklab/grid.hpp"

namespace harnack {

/// User thresholds for the seven verdicts. Any positive finite constants are admissible;
/// the values here are experiment parameters.
struct Thresholds {
  double L_max = 10.0;
  double kappa_min = 0.05;
  /// Subharmonicity tolerance factor: the defect passes when >= -c_tol * L_hat / h.
  double c_tol = 1e-3;
  double mu_min = 0.1;
  double Lambda_max = 4.0;
  double eta_min = 0.1;
};

struct Verdict {
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct HypothesisMeta {
  int dim = 0;
  int n = 0;
  double h = 0.0;
  std::string radius_rule;
  double density_radius_floor = 0.0;
  double level_radius_floor = 0.0;
  std::vector<double> t_grid;
  double t_floor_factor = 0.0;
  double kappa_dist_floor = 0.0;
  double tol_sub = 0.0;
  bool origin_on_boundary = false;
};

struct HypothesisReport {
  // NaN marks an estimate that could not be formed (see the verdict note).
  double L_hat = 0.0;
  double kappa_hat = 0.0;
  double subharmonic_defect = 0.0;
  double mu_hat = 0.0;
  double Lambda_hat = 0.0;
  double eta_hat = 0.0;
  std::map<char, Verdict> verdicts;  // keys 'a'..'g'
  HypothesisMeta meta;
  Thresholds thresholds;

  bool all_pass() const;
};

/// Dyadic radii 2^-j * rho_max, j = 0, 1, ..., kept while >= floor.
std::vector<double> dyadic_radii(double rho_max, double floor);

/// Condition (b): max |phi(x) - phi(y)| / h over face-neighbor pairs inside B_1.
double estimate_lipschitz(const ScalarField& phi);

/// Condition (c): min phi/dist over inside nodes with |x| < 1/2 and dist >= 2h.
double estimate_kappa(const ScalarField& phi, const ScalarField& dist);

/// Condition (d): most negative discrete Laplacian over nodes whose whole
/// stencil lies in B_1 (0 when none is negative).
double subharmonic_defect(const ScalarField& phi);
double subharmonic_tolerance(double L_hat, double h, double c_tol);

/// Condition (e): min exterior node fraction over boundary nodes and dyadic radii >= 4h.
double estimate_density(const DomainMask& mask);

/// Condition (f): max of |{0 < phi < rt} ∩ B_r| / (t |B_r|) over boundary nodes,
/// dyadic radii >= 8h and t = 2^-m with rt >= 2 L_hat h.
double estimate_level_constant(const ScalarField& phi);
double estimate_level_constant(const ScalarField& phi, const DomainMask& mask, double L_hat);
std::vector<double> level_t_grid(double L_hat, double h);

/// sup of phi over the closed ball: node values inside plus interpolated values
/// on a sampling of the sphere of radius r.
double ball_sup(const ScalarField& phi, const Point& center, double r);

/// Condition (g): min over boundary nodes and dyadic radii >= 4h of sup_{B_r} phi / r.
double estimate_nondegeneracy(const ScalarField& phi);
double estimate_nondegeneracy(const ScalarField& phi, const DomainMask& mask);

/// Runs every estimator; estimator failures become failed verdicts.
HypothesisReport full_report(const ScalarField& phi, const Thresholds& thresholds = {});

}  // namespace harnack
