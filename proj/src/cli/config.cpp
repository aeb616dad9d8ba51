#include "cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "harnacklab/builtins.hpp"
#include "harnacklab/corpus.hpp"

namespace harnack::cli {

std::function<double(const Point&)> sphere_function(const std::string& name) {
  // planar data uses x_2 as the vertical coordinate; 3D data uses x_3
  auto angle = [](const Point& x) { return std::atan2(x[1], x[0]); };
  auto vertical = [](const Point& x) { return x[2] != 0.0 ? x[2] : x[1]; };
  if (name == "one") return [](const Point&) { return 1.0; };
  if (name == "halfspace") return [=](const Point& x) { return std::max(vertical(x), 0.0); };
  if (name == "halfspace-tilted") {
    return [=](const Point& x) { return std::max(vertical(x), 0.0) * (1.0 + 0.5 * x[0]); };
  }
  if (name == "cos") return [=](const Point& x) { return 1.0 + 0.5 * std::cos(angle(x)); };
  if (name == "sin2") return [=](const Point& x) { return 1.0 + 0.5 * std::sin(2.0 * angle(x) + 1.0); };
  if (name == "spikes") {
    return [=](const Point& x) {
      const double t = angle(x);
      return std::exp(-std::pow((t - 0.15) / 0.2, 2)) + std::exp(-std::pow((t - 3.0) / 0.2, 2));
    };
  }
  throw ConfigError("unknown sphere data '" + name + "'");
}

const std::vector<std::string>& sphere_function_names() {
  static const std::vector<std::string> names{"one", "halfspace", "halfspace-tilted", "cos", "sin2", "spikes"};
  return names;
}

namespace {

struct Context {
  std::string source;
  std::set<std::string> overridden;

  std::string where(const YAML::Node& node, const std::string& path) const {
    for (const auto& o : overridden) {
      if (path == o || path.rfind(o + ".", 0) == 0) return "override '" + o + "'";
    }
    const YAML::Mark m = node.Mark();
    if (m.is_null()) return source;
    return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
  }
};

template <class T>
struct TypeName;
template <>
struct TypeName<double> {
  static constexpr const char* value = "a number";
};
template <>
struct TypeName<int> {
  static constexpr const char* value = "an integer";
};
template <>
struct TypeName<std::uint64_t> {
  static constexpr const char* value = "a non-negative integer";
};
template <>
struct TypeName<bool> {
  static constexpr const char* value = "true or false";
};
template <>
struct TypeName<std::string> {
  static constexpr const char* value = "a string";
};

class Section {
 public:
  Section(const Context& ctx, YAML::Node node, std::string path) : ctx_(ctx), node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(ctx_.where(node_, path_) + ": '" + path_ + "' must be a mapping");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    YAML::Node v = lookup(key);
    if (v) out = scalar<T>(v, full(key));
  }

  void get(const std::string& key, std::optional<double>& out) {
    YAML::Node v = lookup(key);
    if (v && !v.IsNull()) out = scalar<double>(v, full(key));
  }

  template <class T>
  void get(const std::string& key, std::vector<T>& out) {
    YAML::Node v = lookup(key);
    if (!v) return;
    if (!v.IsSequence()) throw ConfigError(ctx_.where(v, full(key)) + ": '" + full(key) + "' must be a list");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(scalar<T>(v[i], full(key)));
  }

  std::optional<Section> sub(const std::string& key) {
    YAML::Node v = lookup(key);
    if (!v || v.IsNull()) return std::nullopt;
    return Section(ctx_, v, full(key));
  }

  /// Throws on the first key that no getter asked for.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string k = it->first.as<std::string>();
      if (!seen_.count(k)) {
        throw ConfigError(ctx_.where(it->first, full(k)) + ": unknown key '" + full(k) + "'");
      }
    }
  }

  void require(bool ok, const std::string& key, const std::string& what) const {
    if (ok) return;
    YAML::Node v = node_[key];
    throw ConfigError(ctx_.where(v ? v : node_, full(key)) + ": '" + full(key) + "' " + what);
  }

 private:
  YAML::Node lookup(const std::string& key) {
    seen_.insert(key);
    const YAML::Node& cn = node_;
    return cn[key];
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  T scalar(const YAML::Node& v, const std::string& path) const {
    if (v.IsScalar()) {
      try {
        return v.as<T>();
      } catch (const YAML::Exception&) {
      }
    }
    throw ConfigError(ctx_.where(v, path) + ": expected " + TypeName<T>::value + " for '" + path + "'");
  }

  const Context& ctx_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void apply_override(YAML::Node& root, const std::string& spec, Context& ctx) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + spec + "': expected key=value");
  const std::string key = spec.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("override '" + spec + "': empty key segment");
    parts.push_back(p);
  }
  YAML::Node value;
  try {
    value = YAML::Load(spec.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + key + "': " + e.msg);
  }
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = cur[parts[i]];
    if (!next.IsMap()) {
      cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = cur[parts[i]];
    }
    cur.reset(next);
  }
  cur[parts.back()] = value;
  ctx.overridden.insert(key);
}

void read_grid(Section& s, Config& c) {
  s.get("dim", c.dim);
  s.get("n", c.n);
  s.require(c.dim == 2 || c.dim == 3, "dim", "must be 2 or 3");
  s.require(c.n >= 9 && c.n % 2 == 1, "n", "must be odd and at least 9");
  s.finish();
}

void read_domain(Section& s, Config& c) {
  auto& d = c.domain;
  s.get("builtin", d.builtin);
  s.get("field", d.field);
  s.get("freeboundary", d.freeboundary);
  s.get("n_src", d.n_src);
  s.get("Lambda", d.Lambda);
  const int sources = !d.builtin.empty() + !d.field.empty() + !d.freeboundary.empty();
  s.require(sources <= 1, "builtin", "conflicts with another domain source (give one of builtin, field, freeboundary)");
  if (!d.builtin.empty()) {
    const auto names = builtins::names();
    s.require(std::find(names.begin(), names.end(), d.builtin) != names.end(), "builtin", "is not a builtin domain");
  }
  if (!d.freeboundary.empty()) {
    bool known = false;
    for (const auto& e : corpus_entries()) known = known || e.name == d.freeboundary;
    s.require(known, "freeboundary", "is not a corpus entry");
  }
  s.require(d.n_src >= 9 && d.n_src % 2 == 1, "n_src", "must be odd and at least 9");
  s.require(!d.Lambda || *d.Lambda > 0.0, "Lambda", "must be positive");
  s.finish();
}

void read_thresholds(Section& s, Thresholds& t) {
  s.get("L_max", t.L_max);
  s.get("kappa_min", t.kappa_min);
  s.get("c_tol", t.c_tol);
  s.get("mu_min", t.mu_min);
  s.get("Lambda_max", t.Lambda_max);
  s.get("eta_min", t.eta_min);
  s.finish();
}

void read_solver(Section& s, SolverSettings& st) {
  s.get("tol", st.tol);
  s.get("max_sweeps", st.max_sweeps);
  s.get("omega", st.omega);
  s.require(st.tol > 0.0, "tol", "must be positive");
  s.require(st.max_sweeps > 0, "max_sweeps", "must be positive");
  s.require(st.omega == 0.0 || (st.omega > 0.0 && st.omega < 2.0), "omega", "must be 0 (auto) or in (0, 2)");
  s.finish();
}

void require_data(Section& s, const std::string& key, const std::string& name) {
  const auto& names = sphere_function_names();
  s.require(std::find(names.begin(), names.end(), name) != names.end(), key, "is not a known sphere data name");
}

void require_point(Section& s, const std::string& key, const std::vector<double>& p, int dim) {
  s.require(p.empty() || static_cast<int>(p.size()) == dim, key, "must have one coordinate per dimension");
}

void read_fb(Section& s, FbSettings& f) {
  s.get("max_outer", f.max_outer);
  s.get("descent_tol", f.descent_tol);
  s.get("final_tol", f.final_tol);
  s.get("coarsest_n", f.coarsest_n);
  s.get("cycle_window", f.cycle_window);
  s.require(f.max_outer > 0, "max_outer", "must be positive");
  s.require(f.coarsest_n >= 9 && f.coarsest_n % 2 == 1, "coarsest_n", "must be odd and at least 9");
  s.finish();
}

void read_chain(Section& s, Config& c) {
  auto& ch = c.chain;
  s.get("delta", ch.delta);
  s.get("sigma_min", ch.settings.sigma_min);
  s.get("H_cfg", ch.settings.H_cfg);
  s.get("calibrate", ch.calibrate);
  s.get("calibration_n", ch.calibration_n);
  s.get("margin", ch.margin);
  s.get("x0", ch.x0);
  s.get("seeds", ch.seeds);
  s.get("fields", ch.fields);
  s.require(ch.delta > 0.0, "delta", "must be positive");
  s.require(ch.settings.sigma_min > 0.0, "sigma_min", "must be positive");
  s.require(ch.settings.H_cfg >= 1.0, "H_cfg", "must be at least 1");
  s.require(ch.margin >= 1.0, "margin", "must be at least 1");
  s.require(ch.seeds >= 0 && ch.fields >= 0, "seeds", "and fields must be non-negative");
  require_point(s, "x0", ch.x0, c.dim);
  s.finish();
}

void read_acf(Section& s, Config& c) {
  auto& a = c.acf;
  s.get("pair", a.pair);
  s.get("psi1", a.psi1);
  s.get("psi2", a.psi2);
  s.get("seed1", a.seed1);
  s.get("seed2", a.seed2);
  s.get("level", a.level);
  s.get("r_min", a.r_min);
  s.get("r_max", a.r_max);
  s.get("count", a.count);
  s.get("tol", a.tol);
  s.require(a.pair == "halfplane" || a.pair == "sector" || a.pair == "files" || a.pair == "truncate", "pair",
            "must be one of halfplane, sector, files, truncate");
  s.require(a.pair != "files" || (!a.psi1.empty() && !a.psi2.empty()), "pair", "files needs psi1 and psi2");
  s.require(a.pair != "truncate" || (!a.seed1.empty() && !a.seed2.empty()), "pair", "truncate needs seed1 and seed2");
  require_point(s, "seed1", a.seed1, c.dim);
  require_point(s, "seed2", a.seed2, c.dim);
  s.require(a.r_min > 0.0 && a.r_min < a.r_max && a.r_max < 1.0, "r_min", "and r_max need 0 < r_min < r_max < 1");
  s.require(a.count >= 3, "count", "must be at least 3");
  s.finish();
}

void read_bhi(Section& s, Config& c) {
  auto& b = c.bhi;
  auto& st = b.settings;
  s.get("delta", st.delta);
  s.get("R", st.R);
  s.get("rho", st.rho);
  s.get("floor", st.floor);
  s.get("r0", st.r0);
  s.get("levels", st.levels);
  s.get("tol_osc", st.tol_osc);
  s.get("min_nodes", st.min_nodes);
  s.get("P", b.P);
  s.get("x0", b.x0);
  s.get("u_data", b.u_data);
  s.get("v_data", b.v_data);
  s.get("u_component", b.u_component);
  s.get("v_component", b.v_component);
  s.get("w_data", b.w_data);
  s.get("M_cfg", b.M_cfg);
  s.get("C_max", b.C_max);
  s.require(st.rho > 0.0 && st.rho < st.R && st.R <= 1.0, "rho", "and R need 0 < rho < R <= 1");
  s.require(st.delta > 0.0, "delta", "must be positive");
  s.require(st.floor >= 0.0 && st.floor < 1.0, "floor", "must be in [0, 1)");
  s.require(st.levels >= 2, "levels", "must be at least 2");
  require_data(s, "u_data", b.u_data);
  require_data(s, "v_data", b.v_data);
  require_data(s, "w_data", b.w_data);
  require_point(s, "P", b.P, c.dim);
  require_point(s, "x0", b.x0, c.dim);
  require_point(s, "u_component", b.u_component, c.dim);
  require_point(s, "v_component", b.v_component, c.dim);
  s.finish();
}

void read_report(Section& s, Config& c) {
  auto& r = c.report;
  s.get("n_src", r.n_src);
  s.get("n_out", r.n_out);
  s.get("entries", r.entries);
  s.get("chain_seeds", r.chain_seeds);
  s.get("fields", r.fields);
  s.get("sub_super_trials", r.sub_super_trials);
  s.require(r.n_src >= 9 && r.n_src % 2 == 1, "n_src", "must be odd and at least 9");
  s.require(!r.n_out.empty(), "n_out", "must list at least one resolution");
  for (int n : r.n_out) s.require(n >= 9 && n % 2 == 1, "n_out", "entries must be odd and at least 9");
  for (const auto& name : r.entries) {
    bool known = false;
    for (const auto& e : corpus_entries()) known = known || e.name == name;
    s.require(known, "entries", "names an unknown corpus entry '" + name + "'");
  }
  s.finish();
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source, const std::vector<std::string>& overrides) {
  Context ctx{source, {}};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o, ctx);

  Config c;
  Section top(ctx, root, "");
  top.get("seed", c.seed);
  top.get("output", c.output);
  // grid first: points elsewhere are checked against its dimension
  if (auto s = top.sub("grid")) read_grid(*s, c);
  if (auto s = top.sub("domain")) read_domain(*s, c);
  if (auto s = top.sub("thresholds")) read_thresholds(*s, c.thresholds);
  if (auto s = top.sub("solver")) read_solver(*s, c.solver);
  if (auto s = top.sub("solve")) {
    s->get("data", c.solve_data);
    require_data(*s, "data", c.solve_data);
    s->finish();
  }
  if (auto s = top.sub("freeboundary")) read_fb(*s, c.freeboundary);
  if (auto s = top.sub("chain")) read_chain(*s, c);
  if (auto s = top.sub("acf")) read_acf(*s, c);
  if (auto s = top.sub("bhi")) read_bhi(*s, c);
  if (auto s = top.sub("report")) read_report(*s, c);
  top.require(!c.output.empty(), "output", "must not be empty");
  top.finish();
  return c;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, overrides);
}

namespace {

void emit_point(YAML::Emitter& e, const std::string& key, const std::vector<double>& p) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : p) e << x;
  e << YAML::EndSeq;
}

}  // namespace

std::string to_yaml(const Config& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "output" << YAML::Value << c.output;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap << YAML::Key << "dim" << YAML::Value << c.dim
    << YAML::Key << "n" << YAML::Value << c.n << YAML::EndMap;

  e << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "builtin" << YAML::Value << c.domain.builtin;
  e << YAML::Key << "field" << YAML::Value << c.domain.field;
  e << YAML::Key << "freeboundary" << YAML::Value << c.domain.freeboundary;
  e << YAML::Key << "n_src" << YAML::Value << c.domain.n_src;
  e << YAML::Key << "Lambda" << YAML::Value;
  if (c.domain.Lambda) {
    e << *c.domain.Lambda;
  } else {
    e << YAML::Null;
  }
  e << YAML::EndMap;

  const auto& t = c.thresholds;
  e << YAML::Key << "thresholds" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "L_max" << YAML::Value << t.L_max << YAML::Key << "kappa_min" << YAML::Value << t.kappa_min;
  e << YAML::Key << "c_tol" << YAML::Value << t.c_tol << YAML::Key << "mu_min" << YAML::Value << t.mu_min;
  e << YAML::Key << "Lambda_max" << YAML::Value << t.Lambda_max << YAML::Key << "eta_min" << YAML::Value
    << t.eta_min;
  e << YAML::EndMap;

  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tol" << YAML::Value << c.solver.tol << YAML::Key << "max_sweeps" << YAML::Value
    << c.solver.max_sweeps << YAML::Key << "omega" << YAML::Value << c.solver.omega;
  e << YAML::EndMap;
  e << YAML::Key << "solve" << YAML::Value << YAML::BeginMap << YAML::Key << "data" << YAML::Value << c.solve_data
    << YAML::EndMap;

  const auto& f = c.freeboundary;
  e << YAML::Key << "freeboundary" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "max_outer" << YAML::Value << f.max_outer << YAML::Key << "descent_tol" << YAML::Value
    << f.descent_tol << YAML::Key << "final_tol" << YAML::Value << f.final_tol;
  e << YAML::Key << "coarsest_n" << YAML::Value << f.coarsest_n << YAML::Key << "cycle_window" << YAML::Value
    << f.cycle_window;
  e << YAML::EndMap;

  const auto& ch = c.chain;
  e << YAML::Key << "chain" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "delta" << YAML::Value << ch.delta << YAML::Key << "sigma_min" << YAML::Value
    << ch.settings.sigma_min << YAML::Key << "H_cfg" << YAML::Value << ch.settings.H_cfg;
  e << YAML::Key << "calibrate" << YAML::Value << ch.calibrate << YAML::Key << "calibration_n" << YAML::Value
    << ch.calibration_n << YAML::Key << "margin" << YAML::Value << ch.margin;
  emit_point(e, "x0", ch.x0);
  e << YAML::Key << "seeds" << YAML::Value << ch.seeds << YAML::Key << "fields" << YAML::Value << ch.fields;
  e << YAML::EndMap;

  const auto& a = c.acf;
  e << YAML::Key << "acf" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "pair" << YAML::Value << a.pair << YAML::Key << "psi1" << YAML::Value << a.psi1 << YAML::Key
    << "psi2" << YAML::Value << a.psi2;
  emit_point(e, "seed1", a.seed1);
  emit_point(e, "seed2", a.seed2);
  e << YAML::Key << "level" << YAML::Value << a.level << YAML::Key << "r_min" << YAML::Value << a.r_min
    << YAML::Key << "r_max" << YAML::Value << a.r_max << YAML::Key << "count" << YAML::Value << a.count
    << YAML::Key << "tol" << YAML::Value << a.tol;
  e << YAML::EndMap;

  const auto& b = c.bhi;
  const auto& s = b.settings;
  e << YAML::Key << "bhi" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "delta" << YAML::Value << s.delta << YAML::Key << "R" << YAML::Value << s.R << YAML::Key
    << "rho" << YAML::Value << s.rho << YAML::Key << "floor" << YAML::Value << s.floor;
  e << YAML::Key << "r0" << YAML::Value << s.r0 << YAML::Key << "levels" << YAML::Value << s.levels << YAML::Key
    << "tol_osc" << YAML::Value << s.tol_osc << YAML::Key << "min_nodes" << YAML::Value << s.min_nodes;
  emit_point(e, "P", b.P);
  emit_point(e, "x0", b.x0);
  e << YAML::Key << "u_data" << YAML::Value << b.u_data << YAML::Key << "v_data" << YAML::Value << b.v_data;
  emit_point(e, "u_component", b.u_component);
  emit_point(e, "v_component", b.v_component);
  e << YAML::Key << "w_data" << YAML::Value << b.w_data << YAML::Key << "M_cfg" << YAML::Value << b.M_cfg
    << YAML::Key << "C_max" << YAML::Value << b.C_max;
  e << YAML::EndMap;

  const auto& r = c.report;
  e << YAML::Key << "report" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n_src" << YAML::Value << r.n_src;
  e << YAML::Key << "n_out" << YAML::Value << YAML::Flow << r.n_out;
  e << YAML::Key << "entries" << YAML::Value << YAML::Flow << r.entries;
  e << YAML::Key << "chain_seeds" << YAML::Value << r.chain_seeds << YAML::Key << "fields" << YAML::Value
    << r.fields << YAML::Key << "sub_super_trials" << YAML::Value << r.sub_super_trials;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace harnack::cli
