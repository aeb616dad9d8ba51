#include "harnacklab/corpus.hpp"

#include <limits>

namespace harnack {

std::vector<CorpusEntry> corpus_entries() {
  return {
      {"fb-a", 1.0, 0.05, 0.20, 3, 0.3, {{0.5, 2, 0.1}}, 1.0},
      {"fb-b", 1.2, 0.00, 0.25, 2, 1.0, {{0.4, 3, 0.7}}, 1.0},
      {"fb-c", 1.1, 0.10, 0.15, 4, 2.0, {{0.6, 1, 0.4}}, 1.0},
      {"fb-d", 1.3, -0.05, 0.30, 3, 4.0, {{0.3, 4, 1.3}}, 1.0},
      {"fb-e", 1.0, 0.15, 0.20, 2, 5.0, {{0.4, 2, 0.2}, {0.3, 5, 2.2}}, 1.0},
  };
}

VectorField corpus_data(const CorpusEntry& e, const Grid& g) {
  if (g.dim() != 2) throw Error("corpus data is defined in d = 2");
  std::vector<std::vector<double>> comps(1 + e.extra.size(), std::vector<double>(g.size(), 0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.in_unit_ball(i)) continue;
    const Point x = g.coords(i);
    const double t = std::atan2(x[1], x[0]);
    const double u1 = e.A * std::max(0.0, std::sin(t) + e.beta + e.gamma * std::cos(e.m * t + e.psi));
    comps[0][i] = u1;
    for (std::size_t j = 0; j < e.extra.size(); ++j) {
      comps[j + 1][i] = e.extra[j].c * std::sin(e.extra[j].m * t + e.extra[j].psi) * u1;
    }
  }
  std::vector<ScalarField> fields;
  for (auto& c : comps) fields.emplace_back(g, std::move(c), Role::auxiliary);
  return VectorField(std::move(fields));
}

std::size_t nearest_boundary_node(const DomainMask& mask) {
  const auto nodes = mask.boundary_nodes();
  if (nodes.empty()) throw Error("domain has no boundary nodes");
  std::size_t best = nodes.front();
  for (std::size_t i : nodes) {
    if (mask.grid().norm(i) < mask.grid().norm(best)) best = i;
  }
  return best;
}

RescaledDomain rescale_solution(const FbSolution& sol, std::size_t x0, double r, int n_out, double tol) {
  const ScalarField phi_s = rescale_field(sol.phi, x0, r, n_out);
  const DomainMask mask0 = mask_from_state(phi_s);
  const Grid& g = phi_s.grid();
  SolverSettings st;
  st.tol = tol;
  std::vector<ScalarField> comps;
  for (const auto& u : sol.U.components()) {
    const ScalarField data = rescale_field(u, x0, r, n_out);
    std::vector<double> bd(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.in_unit_ball(i)) bd[i] = data[i];
    }
    HarmonicField hf = solve({mask0, ScalarField(g, std::move(bd), Role::auxiliary), st});
    comps.push_back(hf.field().with_role(Role::auxiliary));
  }
  VectorField U(std::move(comps));
  ScalarField phi = make_state(g, U.modulus());
  DomainMask mask = mask_from_state(phi);
  return {std::move(U), std::move(phi), std::move(mask)};
}

CorpusDomain build_corpus_domain(const CorpusEntry& entry, int n_src, const std::vector<int>& n_out,
                                 const FbSettings& settings) {
  const Grid g(2, n_src);
  FbSolution raw = minimize({entry.Lambda, corpus_data(entry, g), settings});
  const std::size_t anchor = nearest_boundary_node(mask_from_state(raw.phi));
  CorpusDomain dom{entry, raw, anchor, 0.5, {}};
  for (int n : n_out) dom.rescaled.emplace(n, rescale_solution(raw, anchor, dom.r, n));
  return dom;
}

}  // namespace harnack
