#pragma once

#include <map>
#include <string>
#include <vector>

#include "harnacklab/freeboundary.hpp"

namespace harnack {

/// Sphere data of a vectorial free-boundary instance in d = 2:
///   u_1 = A (sin t + beta + gamma cos(m t + psi))^+,
///   u_j = c_j sin(m_j t + psi_j) u_1 for j >= 2,
/// so every extra component vanishes where u_1 does.
struct CorpusEntry {
  struct Extra {
    double c;
    int m;
    double psi;
  };
  std::string name;
  double A = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  int m = 2;
  double psi = 0.0;
  std::vector<Extra> extra;
  double Lambda = 1.0;
};

std::vector<CorpusEntry> corpus_entries();

VectorField corpus_data(const CorpusEntry& entry, const Grid& grid);

struct RescaledDomain {
  VectorField U;
  ScalarField phi;
  DomainMask mask;
};

struct CorpusDomain {
  CorpusEntry entry;
  FbSolution raw;
  std::size_t anchor = 0;  // boundary node of the raw domain nearest the origin
  double r = 0.5;
  std::map<int, RescaledDomain> rescaled;
};

/// U_{r,x0} = U(x0 + r x)/r sampled on an n_out grid, with every component
/// re-solved as a harmonic function on the rescaled positivity set.
RescaledDomain rescale_solution(const FbSolution& sol, std::size_t x0, double r, int n_out, double tol = 1e-9);

/// Boundary node nearest the origin (lowest index on ties).
std::size_t nearest_boundary_node(const DomainMask& mask);

CorpusDomain build_corpus_domain(const CorpusEntry& entry, int n_src, const std::vector<int>& n_out,
                                 const FbSettings& settings = {});

}  // namespace harnack
