#include <CLI11.hpp>

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace harnack::cli;
  CLI::App app{"harnacklab: boundary Harnack experiments on grid domains"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved configuration as YAML and exit");

  struct Options {
    std::string config;
    std::vector<std::string> set;
    std::string output, builtin, field, freeboundary;
    int n = 0;
    long long seed = -1;
  };
  const std::map<std::string, std::string> about{
      {"gen-domain", "Write the state function phi as domain.fld"},
      {"check-hypotheses", "Estimate the hypothesis constants of phi"},
      {"solve", "Solve the Dirichlet problem on Omega with sphere data"},
      {"chain", "Build Harnack chains from near-boundary seeds"},
      {"acf", "Alt-Caffarelli-Friedman profile of a pair"},
      {"verify-bhi", "Measure the boundary Harnack ratio M, oscillation decay and the step-2 bounds"},
      {"report", "Run everything over the free-boundary corpus"}};
  std::map<std::string, Options> opts;
  std::vector<CLI::App*> subs;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    auto& o = opts[name];
    sub->add_option("--config", o.config, "YAML config file");
    sub->add_option("--set", o.set, "Override a config key: dotted.key=value (repeatable)");
    sub->add_option("--out", o.output, "Output directory (output)");
    sub->add_option("--builtin", o.builtin, "Builtin domain (domain.builtin)");
    sub->add_option("--field", o.field, "FLD1 state function (domain.field)");
    sub->add_option("--freeboundary", o.freeboundary, "Corpus entry to minimize (domain.freeboundary)");
    sub->add_option("--n", o.n, "Nodes per axis (grid.n)");
    sub->add_option("--seed", o.seed, "Random seed (seed)");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = nullptr;
  for (auto* s : subs) {
    if (s->parsed()) chosen = s;
  }
  try {
    if (!chosen) {
      if (print_config) {
        std::cout << to_yaml(Config{});
        return 0;
      }
      std::cerr << app.help();
      return 2;
    }
    const auto& o = opts[chosen->get_name()];
    std::vector<std::string> overrides = o.set;
    if (!o.output.empty()) overrides.push_back("output=" + o.output);
    if (!o.builtin.empty()) overrides.push_back("domain.builtin=" + o.builtin);
    if (!o.field.empty()) overrides.push_back("domain.field=\"" + o.field + "\"");
    if (!o.freeboundary.empty()) overrides.push_back("domain.freeboundary=" + o.freeboundary);
    if (o.n > 0) overrides.push_back("grid.n=" + std::to_string(o.n));
    if (o.seed >= 0) overrides.push_back("seed=" + std::to_string(o.seed));
    const Config cfg = o.config.empty() ? parse_config("", "<defaults>", overrides) : load_config(o.config, overrides);
    if (print_config) {
      std::cout << to_yaml(cfg);
      return 0;
    }
    return run_command(chosen->get_name(), cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "harnacklab: error: " << e.what() << "\n";
    return 2;
  }
}
