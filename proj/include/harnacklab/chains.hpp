#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "harnacklab/grid.hpp"
#include "harnacklab/harmonic.hpp"

namespace harnack {

struct ChainSettings {
  double sigma_min = 0.05;
  /// Per-step Harnack constant used for H_bound and transfer checks.
  double H_cfg = 4.0;
};

/// Raised when the best annulus node fails to improve phi by 1 + sigma_min.
class ChainError : public Error {
 public:
  ChainError(const std::string& what, std::size_t node, double ratio) : Error(what), node_(node), ratio_(ratio) {}
  std::size_t node() const { return node_; }
  double ratio() const { return ratio_; }

 private:
  std::size_t node_;
  double ratio_;
};

struct StepResult {
  std::size_t node = 0;
  double ratio = 0.0;
};

struct HarnackChain {
  std::vector<std::size_t> points;  // x_0 .. x_N
  std::vector<double> radii;        // r_k = dist(x_k), k < N
  double sigma_achieved = 0.0;      // NaN for an empty chain
  double H_bound = 1.0;
  double terminal_level = 0.0;

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

/// Nodes y with ||y - x0| - r| <= h/2, r = dist(x0).
std::vector<std::size_t> annulus_nodes(const Grid& grid, std::size_t x0, double r);

/// argmax of phi over the annulus of radius dist(x0) about x0. Ties go to the
/// node closest to the exact sphere, then to the lowest index.
StepResult improving_step(const ScalarField& phi, const ScalarField& dist, std::size_t x0,
                          const ChainSettings& settings = {});

/// ceil(log(target / phi0) / log(1 + sigma)), at least 0.
int chain_step_bound(double target, double phi0, double sigma);

/// Iterates improving_step from x0 until phi exceeds delta.
HarnackChain escape_chain(const ScalarField& phi, const ScalarField& dist, std::size_t x0, double delta,
                          const ChainSettings& settings = {});

/// Checks every invariant of a chain; throws Error naming the first violation.
void validate_chain(const HarnackChain& chain, const ScalarField& phi, const ChainSettings& settings);

struct TransferResult {
  double max_step_ratio = 1.0;
  double end_to_end_ratio = 1.0;
  bool step_ok = true;
  bool end_ok = true;
  bool pass() const { return step_ok && end_ok; }
};

TransferResult chain_transfer_bound(const HarnackChain& chain, const HarmonicField& w, double H_cfg);

struct ConnectResult {
  bool connected = false;
  std::vector<std::size_t> path;
  std::uint32_t label1 = 0;
  std::uint32_t label2 = 0;
};

/// Superlevel flags B_R ∩ {phi > level}.
std::vector<std::uint8_t> superlevel_flags(const ScalarField& phi, double level, double R);

/// Path through B_R ∩ {phi > delta R / 2} between x1 and x2, both required to
/// lie in B_{tau R} ∩ {phi > delta R}.
ConnectResult connect_away(const ScalarField& phi, std::size_t x1, std::size_t x2, double delta, double R,
                           double tau);

/// Largest tau on the grid {step, 2 step, .., < 1} for which every node of
/// B_{tau R} ∩ {phi > delta R} lies in a single component of B_R ∩ {phi > delta R / 2}.
/// nullopt when even the smallest tau admits no node or fails.
std::optional<double> largest_working_tau(const ScalarField& phi, double delta, double R, double step = 0.05);

/// Up to `count` nodes of B_1/2 with delta/2 < phi <= delta that satisfy the
/// improving_step preconditions, drawn without replacement from `seed`.
std::vector<std::size_t> near_boundary_seeds(const ScalarField& phi, const ScalarField& dist, double delta,
                                             std::size_t count, std::uint64_t seed);

/// Harmonic in Omega, zero on B_1 minus Omega, with sphere data
/// b + sum_k a_k (1 + cos(k t + p_k))/2 (d = 2) or b + sum_k a_k (1 + x_k)/2.
HarmonicField random_positive_field(const DomainMask& mask, std::uint64_t seed, double tol = 1e-9);

/// Largest per-step transfer ratio over every (chain, field) pair.
double max_step_ratio(const std::vector<HarnackChain>& chains, const std::vector<HarmonicField>& fields);

/// H_cfg = margin times the largest per-step ratio seen on the half-space
/// corpus (seeds and fields drawn from `seed`).
double calibrate_harnack_constant(int n, double delta, std::size_t seeds, std::size_t fields, std::uint64_t seed,
                                  double margin = 1.25);

}  // namespace harnack
