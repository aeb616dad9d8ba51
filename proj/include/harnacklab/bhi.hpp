#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/harmonic.hpp"

namespace harnack {

struct BhiSettings {
  double delta = 0.1;
  double R = 0.8;
  double rho = 0.25;
  double floor = 1e-3;
  double r0 = 0.5;
  int levels = 4;
  /// Additive slack on decay factors against 1 - 1/(2M).
  double tol_osc = 0.05;
  /// Fewer admissible nodes than this marks a level unreliable.
  int min_nodes = 10;
};

struct OscLevel {
  double r = 0.0;
  double osc = 0.0;
  double decay_factor = 0.0;  // osc_{k+1}/osc_k, NaN on the last level
  double M_hat = 0.0;         // pair M on this ball, normalized inside it
  double predicted = 0.0;     // 1 - 1/(2 M_hat)
  std::size_t nodes = 0;
  std::size_t excluded = 0;
  bool reliable = false;
  bool ok = true;  // decay bound holds (or not checkable)
};

struct HolderFit {
  double alpha = 0.0;  // +inf: ratio constant
  double C = 0.0;
  double alpha_floor = 0.0;
  std::size_t points = 0;
};

struct BhiReport {
  double M = 0.0;
  double rho = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double floor = 0.0;
  std::size_t P = 0;
  double normalization = 1.0;  // factor applied to v
  std::size_t nodes_used = 0;
  std::size_t nodes_excluded = 0;
  std::vector<OscLevel> levels;
  std::optional<HolderFit> holder;
  std::string note;
  bool pass = false;
};

/// Normalizes v so u(P) = v(P), then M = max of max(u/v, v/u) over Omega nodes
/// in B_rho with min(u, v) >= floor * max_{B_rho} u. When exactly one of u, v
/// vanishes at P the pair is incomparable: M = +inf and the report fails.
BhiReport verify_inequality(const HarmonicField& u, const HarmonicField& v, std::size_t P, double rho, double floor);

/// Max of max(u/(c v), c v/u) on admissible nodes of the ball, with c = u(P)/v(P).
double pair_M(const HarmonicField& u, const HarmonicField& v, std::size_t P, const Point& center, double r,
              double floor, std::size_t* used = nullptr, std::size_t* excluded = nullptr);

/// argmax of phi over Omega nodes of B_r(center); nullopt if none.
std::optional<std::size_t> argmax_in_ball(const ScalarField& phi, const Point& center, double r);

/// Dyadic oscillation ladder of u/v about x0. M_hat at scale r_k is measured on
/// B_{r_k}(x0) with normalization at the argmax of phi over B_{r_k/2}(x0).
std::vector<OscLevel> oscillation_decay(const HarmonicField& u, const HarmonicField& v, const ScalarField& phi,
                                        std::size_t x0, const BhiSettings& settings);

/// Least-squares fit of ln osc against ln r over reliable levels.
HolderFit fit_holder(const std::vector<OscLevel>& levels);
HolderFit fit_holder(const std::vector<double>& r, const std::vector<double>& osc);

struct GrowthResult {
  double p = 0.0;
  double C = 0.0;
  double normalizer = 0.0;  // max of w over B_1 ∩ {phi > delta}
  std::size_t nodes = 0;
};

/// Smallest p with w_n <= (L/phi)^p on B_{1/2} ∩ Omega ∩ {phi >= 2 h L}, where
/// w_n = w / normalizer; C = max of w_n phi^p there.
GrowthResult growth_bound_check(const HarmonicField& w, const ScalarField& phi, double delta, double L_hat);

/// |a - b| <= rel * max(|a|, |b|) or <= abs_floor.
bool stable_within(double a, double b, double rel, double abs_floor = 0.0);

/// eps = 1/(2 max(p, 1/2)).
double step2_exponent(double p);

struct IntegrabilityResult {
  double eps = 0.0;
  double integral = 0.0;       // sum over B_1 nodes of w^eps h^d
  double integral_half = 0.0;  // same over B_{1/2}
  double sup_half = 0.0;
  double sup_quarter = 0.0;
  /// sup over B_{1/2} after scaling w so that its integral is 1.
  double scaled_sup_half = 0.0;
  double defect = 0.0;
  bool pass = false;
};

/// w is scaled by `scale` before use (typically 1/normalizer).
IntegrabilityResult weak_integrability_bound(const HarmonicField& w, double eps, double M_cfg, double scale = 1.0);

/// C^alpha |B_{1/2}| (1 + Lambda alpha p / (1 - alpha p)), |B_{1/2}| by node count.
double step2_integral_bound(const Grid& grid, double C, double alpha, double p, double Lambda);

struct PairCheck {
  double C_star = 0.0;
  bool pass = false;
  std::size_t nodes = 0;
};

/// Smallest power of two C with C u - v >= 0 and C v - u >= 0 on B_rho ∩ {phi > delta rho}.
PairCheck step3_pair_check(const HarmonicField& u, const HarmonicField& v, std::size_t P, const ScalarField& phi,
                           double rho, double delta, double C_max);

struct DeGiorgiResult {
  double zero_fraction = 0.0;
  double max_half = 0.0;
  double bound = 0.0;
  double defect = 0.0;
  bool pass = false;
};

/// For 0 <= w <= 1 subharmonic in B_1: max over B_{1/2} <= 1 - 8^-d mu + slack_h h,
/// mu the zero-node fraction of B_{1/4}.
DeGiorgiResult de_giorgi_check(const ScalarField& w, double slack_h = 5.0);

}  // namespace harnack
