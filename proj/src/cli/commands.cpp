#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <map>

#include "cli/manifest.hpp"
#include "harnacklab/builtins.hpp"
#include "harnacklab/components.hpp"
#include "harnacklab/corpus.hpp"
#include "harnacklab/field_io.hpp"
#include "harnacklab/serialize.hpp"

namespace harnack::cli {

namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

CorpusEntry find_entry(const std::string& name) {
  for (const auto& e : corpus_entries()) {
    if (e.name == name) return e;
  }
  throw Error("unknown corpus entry '" + name + "'");
}

std::size_t node_at(const Grid& g, const std::vector<double>& p) {
  Point x{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < p.size(); ++a) x[a] = p[a];
  const auto node = g.nearest_node(x);
  if (!node) throw Error("point lies outside the grid box");
  return *node;
}

ScalarField load_state(const Config& c) {
  const auto& d = c.domain;
  if (!d.field.empty()) return load_field(d.field);
  if (!d.builtin.empty()) return builtins::by_name(d.builtin, Grid(c.dim, c.n));
  if (!d.freeboundary.empty()) {
    if (c.dim != 2) throw Error("free-boundary domains are planar");
    CorpusEntry e = find_entry(d.freeboundary);
    if (d.Lambda) e.Lambda = *d.Lambda;
    return build_corpus_domain(e, d.n_src, {c.n}, c.freeboundary).rescaled.at(c.n).phi;
  }
  throw Error("no domain source configured (domain.builtin, domain.field or domain.freeboundary)");
}

/// Mask of the component of Omega containing `point`; Omega itself when empty.
DomainMask component_mask(const DomainMask& mask, const std::vector<double>& point) {
  if (point.empty()) return mask;
  const Grid& g = mask.grid();
  std::vector<std::uint8_t> flags(mask.flags().begin(), mask.flags().end());
  const Labeling lab = label_components(g, flags);
  const std::size_t seed = node_at(g, point);
  if (!mask.inside(seed)) throw Error("component point is not inside the domain");
  for (std::size_t i = 0; i < g.size(); ++i) flags[i] = lab.labels[i] == lab.labels[seed] ? 1 : 0;
  return DomainMask(g, std::move(flags));
}

int finish(const Config& c, bool pass) {
  write_manifest(c.output);
  return pass ? 0 : 1;
}

int gen_domain(const Config& c, std::ostream& log) {
  const fs::path out(c.output);
  const auto& d = c.domain;
  if (!d.freeboundary.empty()) {
    if (c.dim != 2) throw Error("free-boundary domains are planar");
    CorpusEntry e = find_entry(d.freeboundary);
    if (d.Lambda) e.Lambda = *d.Lambda;
    const CorpusDomain dom = build_corpus_domain(e, d.n_src, {c.n}, c.freeboundary);
    std::vector<std::string> files;
    for (std::size_t j = 0; j < dom.raw.U.k(); ++j) {
      const std::string f = "fb/U_" + std::to_string(j) + ".fld";
      fs::create_directories(out / "fb");
      save_field(out / f, dom.raw.U[j].with_role(Role::auxiliary));
      files.push_back(f);
    }
    save_field(out / "fb/phi.fld", dom.raw.phi);
    files.push_back("fb/phi.fld");
    const FbProblem problem{e.Lambda, corpus_data(e, Grid(2, d.n_src)), c.freeboundary};
    Json m = fb_manifest(dom.raw, problem, files);
    m["entry"] = e.name;
    m["seed"] = c.seed;
    m["anchor"] = node_json(dom.raw.phi.grid(), dom.anchor);
    m["rescale_r"] = dom.r;
    write_text(out / "fb/fb.json", dump(m));
    save_field(out / "domain.fld", dom.rescaled.at(c.n).phi);
    log << "gen-domain: " << e.name << " minimized at n=" << d.n_src << " in " << dom.raw.iterations
        << " iterations, rescaled to n=" << c.n << "\n";
    return finish(c, dom.raw.converged);
  }
  const ScalarField phi = load_state(c);
  fs::create_directories(out);
  save_field(out / "domain.fld", phi);
  log << "gen-domain: wrote " << (out / "domain.fld").string() << "\n";
  return finish(c, true);
}

int check_hypotheses(const Config& c, std::ostream& log) {
  const ScalarField phi = load_state(c);
  const HypothesisReport rep = full_report(phi, c.thresholds);
  write_text(fs::path(c.output) / "hypotheses.json", dump(to_json(rep)));
  log << "check-hypotheses: " << (rep.all_pass() ? "pass" : "FAIL") << " L=" << rep.L_hat
      << " kappa=" << rep.kappa_hat << " defect=" << rep.subharmonic_defect << " mu=" << rep.mu_hat
      << " Lambda=" << rep.Lambda_hat << " eta=" << rep.eta_hat << "\n";
  return finish(c, rep.all_pass());
}

int solve_cmd(const Config& c, std::ostream& log) {
  const ScalarField phi = load_state(c);
  const DomainMask mask = mask_from_state(phi);
  const HarmonicField w = solve_with_sphere_data(mask, sphere_function(c.solve_data), c.solver);
  const fs::path out(c.output);
  fs::create_directories(out);
  save_field(out / "solution.fld", w.field().with_role(Role::auxiliary));
  write_text(out / "solve.json", dump(Json{{"data", c.solve_data},
                                           {"n", phi.grid().n()},
                                           {"unknowns", mask.count()},
                                           {"residual", number(w.residual())},
                                           {"max", number(w.field().max_value())},
                                           {"tol", c.solver.tol}}));
  log << "solve: " << mask.count() << " unknowns, residual " << w.residual() << "\n";
  return finish(c, true);
}

struct ChainRun {
  Json json;
  bool pass = true;
  double H_cfg = 0.0;
  int max_steps = 0;
  double min_ratio = inf;
  double max_step_ratio = 1.0;
};

ChainRun run_chains(const ScalarField& phi, const ChainConfig& cc, double H_cfg, std::vector<std::size_t> starts,
                    int fields, std::uint64_t seed) {
  ChainRun run;
  run.H_cfg = H_cfg;
  const Grid& g = phi.grid();
  const DomainMask mask = mask_from_state(phi);
  const ScalarField dist = distance_transform(mask);
  ChainSettings st = cc.settings;
  st.H_cfg = H_cfg;
  const int n_max = chain_step_bound(2.0, 1.0, st.sigma_min);
  std::vector<HarnackChain> chains;
  Json list = Json::array(), failures = Json::array();
  for (std::size_t x0 : starts) {
    try {
      const StepResult step = improving_step(phi, dist, x0, st);
      run.min_ratio = std::min(run.min_ratio, step.ratio);
      HarnackChain ch = escape_chain(phi, dist, x0, cc.delta, st);
      validate_chain(ch, phi, st);
      run.max_steps = std::max<int>(run.max_steps, static_cast<int>(ch.steps()));
      if (static_cast<int>(ch.steps()) > n_max) run.pass = false;
      Json j = to_json(ch, g);
      j["first_step_ratio"] = step.ratio;
      list.push_back(j);
      chains.push_back(std::move(ch));
    } catch (const ChainError& e) {
      run.pass = false;
      run.min_ratio = std::min(run.min_ratio, e.ratio());
      failures.push_back(Json{{"x0", node_json(g, x0)}, {"error", e.what()}, {"ratio", number(e.ratio())}});
    }
  }
  Json transfers = Json::array();
  for (int j = 0; j < fields; ++j) {
    const HarmonicField w = random_positive_field(mask, seed + 1000 + static_cast<std::uint64_t>(j));
    TransferResult worst;
    bool ok = true;
    for (const auto& ch : chains) {
      const TransferResult t = chain_transfer_bound(ch, w, H_cfg);
      ok = ok && t.pass();
      worst.max_step_ratio = std::max(worst.max_step_ratio, t.max_step_ratio);
      worst.end_to_end_ratio = std::max(worst.end_to_end_ratio, t.end_to_end_ratio);
    }
    worst.step_ok = worst.max_step_ratio <= H_cfg;
    worst.end_ok = ok;
    run.max_step_ratio = std::max(run.max_step_ratio, worst.max_step_ratio);
    run.pass = run.pass && ok;
    transfers.push_back(to_json(worst));
  }
  run.json = Json{{"pass", run.pass},
                  {"H_cfg", H_cfg},
                  {"sigma_min", st.sigma_min},
                  {"delta", cc.delta},
                  {"N_max", n_max},
                  {"max_steps", run.max_steps},
                  {"min_first_ratio", number(run.min_ratio)},
                  {"max_step_ratio", run.max_step_ratio},
                  {"chains", list},
                  {"failures", failures},
                  {"transfer", transfers}};
  return run;
}

double harnack_constant(const Config& c) {
  const auto& cc = c.chain;
  if (!cc.calibrate) return cc.settings.H_cfg;
  return calibrate_harnack_constant(cc.calibration_n, cc.delta, 50, 10, c.seed, cc.margin);
}

int chain_cmd(const Config& c, std::ostream& log) {
  const ScalarField phi = load_state(c);
  const DomainMask mask = mask_from_state(phi);
  std::vector<std::size_t> starts;
  if (!c.chain.x0.empty()) {
    starts.push_back(node_at(phi.grid(), c.chain.x0));
  } else {
    starts = near_boundary_seeds(phi, distance_transform(mask), c.chain.delta,
                                 static_cast<std::size_t>(c.chain.seeds), c.seed);
  }
  const double H = harnack_constant(c);
  ChainRun run = run_chains(phi, c.chain, H, starts, c.chain.fields, c.seed);
  run.json["calibrated"] = c.chain.calibrate;
  run.json["seed"] = c.seed;
  write_text(fs::path(c.output) / "chains.json", dump(run.json));
  log << "chain: " << (run.pass ? "pass" : "FAIL") << " chains=" << starts.size() << " H_cfg=" << H
      << " max_steps=" << run.max_steps << " max_step_ratio=" << run.max_step_ratio << "\n";
  return finish(c, run.pass);
}

ScalarField from_values(const Grid& g, const std::function<double(const Point&)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.coords(i));
  return ScalarField(g, std::move(v), Role::auxiliary);
}

int acf_cmd(const Config& c, std::ostream& log) {
  const auto& a = c.acf;
  const Grid g(c.dim, c.n);
  const std::size_t last = static_cast<std::size_t>(c.dim - 1);
  ScalarField psi1 = from_values(g, [](const Point&) { return 0.0; }), psi2 = psi1;
  if (a.pair == "halfplane") {
    psi1 = from_values(g, [=](const Point& x) { return std::max(x[last], 0.0); });
    psi2 = from_values(g, [=](const Point& x) { return std::max(-x[last], 0.0); });
  } else if (a.pair == "sector") {
    psi1 = from_values(g, [](const Point& x) { return x[0] > 0 && x[1] > 0 ? 2.0 * x[0] * x[1] : 0.0; });
    psi2 = from_values(g, [](const Point& x) { return x[0] < 0 && x[1] < 0 ? 2.0 * x[0] * x[1] : 0.0; });
  } else if (a.pair == "files") {
    psi1 = load_field(a.psi1);
    psi2 = load_field(a.psi2);
  } else {
    const ScalarField phi = load_state(c);
    psi1 = truncate_component(phi, a.level, node_at(phi.grid(), a.seed1));
    psi2 = truncate_component(phi, a.level, node_at(phi.grid(), a.seed2));
  }
  const AcfProfile prof = acf_phi(psi1, psi2, geometric_radii(a.r_min, a.r_max, a.count));
  const MonotoneVerdict v = check_monotone(prof, a.tol);
  Json j = to_json(prof, v);
  j["pair"] = a.pair;
  j["tol"] = a.tol;
  write_text(fs::path(c.output) / "acf.json", dump(j));
  write_text(fs::path(c.output) / "acf.csv", acf_csv(prof));
  log << "acf: " << (v.pass ? "pass" : "FAIL") << " defect=" << v.monotone_defect << " slope=" << v.log_slope
      << "\n";
  return finish(c, v.pass);
}

struct Step2 {
  GrowthResult growth;
  double eps = 0.0;
  double Lambda_hat = 0.0;
  double bound = 0.0;
  IntegrabilityResult integ;
  PairCheck pair;
};

Step2 run_step2(const ScalarField& phi, const HarmonicField& u, const HarmonicField& v, std::size_t P,
                const BhiConfig& b) {
  Step2 s;
  const DomainMask mask = mask_from_state(phi);
  const HarmonicField w = solve_with_sphere_data(mask, sphere_function(b.w_data));
  s.growth = growth_bound_check(w, phi, b.settings.delta, estimate_lipschitz(phi));
  s.eps = step2_exponent(s.growth.p);
  s.Lambda_hat = estimate_level_constant(phi);
  s.bound = step2_integral_bound(phi.grid(), s.growth.C, s.eps, s.growth.p, s.Lambda_hat);
  s.integ = weak_integrability_bound(w, s.eps, b.M_cfg, 1.0 / s.growth.normalizer);
  s.pair = step3_pair_check(u, v, P, phi, b.settings.rho, b.settings.delta, b.C_max);
  return s;
}

Json step2_json(const Step2& s) {
  return Json{{"p", number(s.growth.p)},
              {"C", number(s.growth.C)},
              {"normalizer", number(s.growth.normalizer)},
              {"nodes", s.growth.nodes},
              {"eps", number(s.eps)},
              {"Lambda_hat", number(s.Lambda_hat)},
              {"integral", number(s.integ.integral)},
              {"integral_half", number(s.integ.integral_half)},
              {"integral_bound", number(s.bound)},
              {"sup_half", number(s.integ.sup_half)},
              {"sup_quarter", number(s.integ.sup_quarter)},
              {"scaled_sup_half", number(s.integ.scaled_sup_half)},
              {"integrability_pass", s.integ.pass},
              {"C_star", number(s.pair.C_star)},
              {"pair_pass", s.pair.pass}};
}

bool step2_pass(const Step2& s) { return s.integ.integral_half <= s.bound + 0.1 && s.integ.pass && s.pair.pass; }

int verify_bhi(const Config& c, std::ostream& log) {
  const auto& b = c.bhi;
  const ScalarField phi = load_state(c);
  const Grid& g = phi.grid();
  const DomainMask mask = mask_from_state(phi);
  const HarmonicField u =
      solve_with_sphere_data(component_mask(mask, b.u_component), sphere_function(b.u_data), c.solver);
  const HarmonicField v =
      solve_with_sphere_data(component_mask(mask, b.v_component), sphere_function(b.v_data), c.solver);
  std::size_t P = 0;
  if (!b.P.empty()) {
    P = node_at(g, b.P);
  } else {
    const auto best = argmax_in_ball(phi, {0.0, 0.0, 0.0}, 0.5 * b.settings.R);
    if (!best) throw Error("no domain node in B_{R/2} to normalize at");
    P = *best;
  }
  BhiReport rep = verify_inequality(u, v, P, b.settings.rho, b.settings.floor);
  rep.R = b.settings.R;
  rep.delta = b.settings.delta;
  bool pass = rep.pass;
  Json extra = Json::object();
  if (std::isfinite(rep.M)) {
    const std::size_t x0 = b.x0.empty() ? g.origin() : node_at(g, b.x0);
    rep.levels = oscillation_decay(u, v, phi, x0, b.settings);
    rep.holder = fit_holder(rep.levels);
    for (const auto& l : rep.levels) pass = pass && l.ok;
    const Step2 s = run_step2(phi, u, v, P, b);
    extra = step2_json(s);
    pass = pass && step2_pass(s);
  }
  Json j = to_json(rep, g);
  j["step2"] = extra;
  j["verdict"] = pass;
  write_text(fs::path(c.output) / "bhi.json", dump(j));
  write_text(fs::path(c.output) / "oscillation.csv", osc_csv(rep.levels));
  log << "verify-bhi: " << (pass ? "pass" : "FAIL") << " M=" << rep.M;
  if (rep.holder) log << " alpha=" << rep.holder->alpha;
  if (!rep.note.empty()) log << " (" << rep.note << ")";
  log << "\n";
  return finish(c, pass);
}

bool nonincreasing(const std::vector<double>& e) {
  for (std::size_t k = 1; k < e.size(); ++k) {
    if (e[k] > e[k - 1]) return false;
  }
  return true;
}

int report_cmd(const Config& c, std::ostream& log) {
  const auto& r = c.report;
  const fs::path out(c.output);
  std::vector<CorpusEntry> entries;
  if (r.entries.empty()) {
    entries = corpus_entries();
  } else {
    for (const auto& name : r.entries) entries.push_back(find_entry(name));
  }
  const double H = harnack_constant(c);
  const int n_lo = *std::min_element(r.n_out.begin(), r.n_out.end());
  const int n_hi = *std::max_element(r.n_out.begin(), r.n_out.end());

  Json domains = Json::array();
  std::string csv = "entry,n,L_hat,kappa_hat,subharmonic_defect,mu_hat,Lambda_hat,eta_hat,hypotheses,M,p,C,sup_quarter\n";
  std::string osc = "entry,r,osc,decay_factor\n";
  bool all = true;
  for (const auto& e : entries) {
    const CorpusDomain dom = build_corpus_domain(e, r.n_src, r.n_out, c.freeboundary);
    const fs::path dir = out / e.name;
    fs::create_directories(dir);
    Json d{{"entry", e.name}, {"Lambda", e.Lambda}, {"iterations", dom.raw.iterations}, {"converged", dom.raw.converged}};
    const bool energy_ok = nonincreasing(dom.raw.energy_history);
    d["energy_nonincreasing"] = energy_ok;
    d["energy_final"] = number(dom.raw.energy_history.empty() ? NAN : dom.raw.energy_history.back());
    d["anchor"] = node_json(dom.raw.phi.grid(), dom.anchor);
    bool pass = energy_ok && dom.raw.converged;

    const SubSuperResult ss = sub_super_check(dom.raw.phi, e.Lambda, e.Lambda, r.sub_super_trials, c.seed);
    // informational: |U| of a vectorial minimizer need not be a scalar supersolution
    d["sub_super"] = to_json(ss);

    // normalization point chosen once on the coarsest grid
    const ScalarField& phi_lo = dom.rescaled.at(n_lo).phi;
    const auto P_lo = argmax_in_ball(phi_lo, {0.0, 0.0, 0.0}, 0.5 * c.bhi.settings.R);
    if (!P_lo) throw Error(e.name + ": no domain node in B_{R/2}");
    const Point P_x = phi_lo.grid().coords(*P_lo);

    Json per_n = Json::object();
    std::map<int, double> M_at, p_at, sup_at;
    for (int n : r.n_out) {
      const RescaledDomain& rd = dom.rescaled.at(n);
      const Grid& g = rd.phi.grid();
      save_field(dir / ("phi_" + std::to_string(n) + ".fld"), rd.phi);
      const HypothesisReport hyp = full_report(rd.phi, c.thresholds);
      write_text(dir / ("hypotheses_" + std::to_string(n) + ".json"), dump(to_json(hyp)));
      pass = pass && hyp.all_pass();

      const HarmonicField u = solve_with_sphere_data(rd.mask, sphere_function(c.bhi.u_data), c.solver);
      const HarmonicField v = solve_with_sphere_data(rd.mask, sphere_function(c.bhi.v_data), c.solver);
      const std::size_t P = *g.nearest_node(P_x);
      BhiReport bhi = verify_inequality(u, v, P, c.bhi.settings.rho, c.bhi.settings.floor);
      bhi.R = c.bhi.settings.R;
      bhi.delta = c.bhi.settings.delta;
      pass = pass && bhi.pass;
      if (n == n_hi && bhi.pass) {
        // the rescaling puts the anchor boundary node at the origin
        bhi.levels = oscillation_decay(u, v, rd.phi, g.origin(), c.bhi.settings);
        bhi.holder = fit_holder(bhi.levels);
        for (const auto& l : bhi.levels) {
          pass = pass && l.ok;
          osc += e.name + "," + format_double(l.r) + "," + format_double(l.osc) + "," + format_double(l.decay_factor) + "\n";
        }
        pass = pass && bhi.holder->alpha > 0.05;
      }
      const Step2 s2 = run_step2(rd.phi, u, v, P, c.bhi);
      pass = pass && step2_pass(s2);
      M_at[n] = bhi.M;
      p_at[n] = s2.growth.p;
      sup_at[n] = s2.integ.sup_quarter;
      Json jb = to_json(bhi, g);
      jb["step2"] = step2_json(s2);
      write_text(dir / ("bhi_" + std::to_string(n) + ".json"), dump(jb));
      per_n[std::to_string(n)] = Json{{"hypotheses", hyp.all_pass()}, {"M", number(bhi.M)}, {"step2", step2_pass(s2)}};
      csv += e.name + "," + std::to_string(n) + "," + format_double(hyp.L_hat) + "," + format_double(hyp.kappa_hat) +
             "," + format_double(hyp.subharmonic_defect) + "," + format_double(hyp.mu_hat) + "," +
             format_double(hyp.Lambda_hat) + "," + format_double(hyp.eta_hat) + "," + (hyp.all_pass() ? "1" : "0") +
             "," + format_double(bhi.M) + "," + format_double(s2.growth.p) + "," + format_double(s2.growth.C) + "," +
             format_double(s2.integ.sup_quarter) + "\n";
    }
    const bool M_stable = stable_within(M_at[n_lo], M_at[n_hi], 0.10);
    const bool p_stable = stable_within(p_at[n_lo], p_at[n_hi], 0.20, 0.05);
    const bool sup_stable = stable_within(sup_at[n_lo], sup_at[n_hi], 0.20);
    d["resolutions"] = per_n;
    d["M_stable"] = M_stable;
    d["p_stable"] = p_stable;
    d["sup_quarter_stable"] = sup_stable;
    pass = pass && M_stable && p_stable && sup_stable;

    const ScalarField& phi_hi = dom.rescaled.at(n_hi).phi;
    const auto starts = near_boundary_seeds(phi_hi, distance_transform(dom.rescaled.at(n_hi).mask), c.chain.delta,
                                            static_cast<std::size_t>(r.chain_seeds), c.seed);
    const ChainRun chains = run_chains(phi_hi, c.chain, H, starts, r.fields, c.seed);
    write_text(dir / "chains.json", dump(chains.json));
    d["chains"] = Json{{"pass", chains.pass},
                       {"seeds", starts.size()},
                       {"max_steps", chains.max_steps},
                       {"min_first_ratio", number(chains.min_ratio)},
                       {"max_step_ratio", chains.max_step_ratio}};
    pass = pass && chains.pass;

    d["pass"] = pass;
    all = all && pass;
    log << "report: " << e.name << (pass ? " pass" : " FAIL") << "\n";
    domains.push_back(d);
  }
  Json summary{{"seed", c.seed},
               {"H_cfg", H},
               {"n_src", r.n_src},
               {"n_out", r.n_out},
               {"pass", all},
               {"domains", domains}};
  write_text(out / "summary.json", dump(summary));
  write_text(out / "summary.csv", csv);
  write_text(out / "oscillation.csv", osc);
  Config echoed = c;
  echoed.output = ".";  // keeps runs into different directories byte-identical
  write_text(out / "config.yaml", to_yaml(echoed));
  return finish(c, all);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen-domain", "check-hypotheses", "solve", "chain",
                                              "acf",        "verify-bhi",       "report"};
  return names;
}

int run_command(const std::string& name, const Config& c, std::ostream& log) {
  if (name == "gen-domain") return gen_domain(c, log);
  if (name == "check-hypotheses") return check_hypotheses(c, log);
  if (name == "solve") return solve_cmd(c, log);
  if (name == "chain") return chain_cmd(c, log);
  if (name == "acf") return acf_cmd(c, log);
  if (name == "verify-bhi") return verify_bhi(c, log);
  if (name == "report") return report_cmd(c, log);
  throw Error("unknown subcommand '" + name + "'");
}

}  // namespace harnack::cli
