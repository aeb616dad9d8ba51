#include "harnacklab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace harnack {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

namespace {

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json node_json(const Grid& grid, std::size_t node) {
  const Point x = grid.coords(node);
  Json c = Json::array();
  for (int a = 0; a < grid.dim(); ++a) c.push_back(x[a]);
  return Json{{"index", node}, {"x", c}};
}

Json to_json(const HypothesisReport& r) {
  Json verdicts = Json::object();
  for (const auto& [key, v] : r.verdicts) {
    Json e{{"pass", v.pass}, {"value", number(v.value)}, {"threshold", number(v.threshold)}};
    if (!v.note.empty()) e["note"] = v.note;
    verdicts[std::string(1, key)] = e;
  }
  const auto& m = r.meta;
  const auto& t = r.thresholds;
  return Json{
      {"L_hat", number(r.L_hat)},
      {"kappa_hat", number(r.kappa_hat)},
      {"subharmonic_defect", number(r.subharmonic_defect)},
      {"mu_hat", number(r.mu_hat)},
      {"Lambda_hat", number(r.Lambda_hat)},
      {"eta_hat", number(r.eta_hat)},
      {"all_pass", r.all_pass()},
      {"verdicts", verdicts},
      {"meta",
       {{"dim", m.dim},
        {"n", m.n},
        {"h", m.h},
        {"radius_rule", m.radius_rule},
        {"density_radius_floor", number(m.density_radius_floor)},
        {"level_radius_floor", number(m.level_radius_floor)},
        {"t_grid", numbers(m.t_grid)},
        {"t_floor_factor", number(m.t_floor_factor)},
        {"kappa_dist_floor", number(m.kappa_dist_floor)},
        {"tol_sub", number(m.tol_sub)},
        {"origin_on_boundary", m.origin_on_boundary},
        {"thresholds",
         {{"L_max", t.L_max},
          {"kappa_min", t.kappa_min},
          {"c_tol", t.c_tol},
          {"mu_min", t.mu_min},
          {"Lambda_max", t.Lambda_max},
          {"eta_min", t.eta_min}}}}}};
}

Json to_json(const HarnackChain& c, const Grid& grid) {
  Json pts = Json::array();
  for (std::size_t p : c.points) pts.push_back(node_json(grid, p));
  return Json{{"points", pts},
              {"radii", numbers(c.radii)},
              {"steps", c.steps()},
              {"sigma_achieved", number(c.sigma_achieved)},
              {"H_bound", number(c.H_bound)},
              {"terminal_level", number(c.terminal_level)}};
}

Json to_json(const TransferResult& t) {
  return Json{{"max_step_ratio", number(t.max_step_ratio)},
              {"end_to_end_ratio", number(t.end_to_end_ratio)},
              {"step_ok", t.step_ok},
              {"end_ok", t.end_ok}};
}

Json to_json(const BhiReport& r, const Grid& grid) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back(Json{{"r", l.r},
                          {"osc", number(l.osc)},
                          {"decay_factor", number(l.decay_factor)},
                          {"M_hat", number(l.M_hat)},
                          {"predicted", number(l.predicted)},
                          {"nodes", l.nodes},
                          {"excluded", l.excluded},
                          {"reliable", l.reliable},
                          {"ok", l.ok}});
  }
  Json j{{"pass", r.pass},
         {"M", number(r.M)},
         {"rho", r.rho},
         {"R", r.R},
         {"delta", r.delta},
         {"floor", r.floor},
         {"P", node_json(grid, r.P)},
         {"normalization", number(r.normalization)},
         {"nodes_used", r.nodes_used},
         {"nodes_excluded", r.nodes_excluded},
         {"levels", levels}};
  if (r.holder) {
    j["holder"] = Json{{"alpha", number(r.holder->alpha)},
                       {"C", number(r.holder->C)},
                       {"alpha_floor", number(r.holder->alpha_floor)},
                       {"points", r.holder->points}};
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const AcfProfile& p, const MonotoneVerdict& v) {
  return Json{{"pass", v.pass},
              {"monotone_defect", number(v.monotone_defect)},
              {"growth_alpha_correlation", number(v.growth_alpha_correlation)},
              {"log_slope", number(v.log_slope)},
              {"radii", numbers(p.radii)},
              {"phi_values", numbers(p.phi_values)},
              {"alpha_values", numbers(p.alpha_values)}};
}

Json to_json(const SubSuperResult& r) {
  Json j{{"pass", r.pass},
         {"seed", r.seed},
         {"trials", r.trials},
         {"upward_tested", r.upward_tested},
         {"downward_tested", r.downward_tested},
         {"tol_E", r.tol_E}};
  if (r.certificate) {
    const auto& c = *r.certificate;
    j["certificate"] = Json{{"kind", c.kind},
                            {"upward", c.upward},
                            {"parameter", c.parameter},
                            {"energy_u", number(c.energy_u)},
                            {"energy_v", number(c.energy_v)}};
  }
  return j;
}

Json fb_manifest(const FbSolution& s, const FbProblem& p, const std::vector<std::string>& files) {
  const auto& st = p.settings;
  return Json{{"Lambda", p.Lambda},
              {"components", s.U.k()},
              {"n", s.phi.grid().n()},
              {"converged", s.converged},
              {"iterations", s.iterations},
              {"energy_history", numbers(s.energy_history)},
              {"settings",
               {{"max_outer", st.max_outer},
                {"descent_tol", st.descent_tol},
                {"final_tol", st.final_tol},
                {"coarsest_n", st.coarsest_n},
                {"cycle_window", st.cycle_window}}},
              {"files", files}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string acf_csv(const AcfProfile& p) {
  std::string out = "r,phi,alpha,ln_phi\n";
  for (std::size_t k = 0; k < p.radii.size(); ++k) {
    const double phi = p.phi_values[k];
    out += format_double(p.radii[k]) + "," + format_double(phi) + "," + format_double(p.alpha_values[k]) + "," +
           format_double(phi > 0.0 ? std::log(phi) : -INFINITY) + "\n";
  }
  return out;
}

std::string osc_csv(const std::vector<OscLevel>& levels) {
  std::string out = "r,osc,decay_factor\n";
  for (const auto& l : levels) {
    out += format_double(l.r) + "," + format_double(l.osc) + "," + format_double(l.decay_factor) + "\n";
  }
  return out;
}

}  // namespace harnack
