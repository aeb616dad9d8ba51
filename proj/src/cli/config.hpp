#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harnacklab/bhi.hpp"
#include "harnacklab/chains.hpp"
#include "harnacklab/freeboundary.hpp"
#include "harnacklab/harmonic.hpp"
#include "harnacklab/hypotheses.hpp"

namespace harnack::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct DomainConfig {
  std::string builtin;       // builtin state function name
  std::string field;         // FLD1 path of a state function
  std::string freeboundary;  // corpus entry name
  int n_src = 257;
  std::optional<double> Lambda;
};

struct ChainConfig {
  ChainSettings settings;
  bool calibrate = true;  // replace H_cfg by the half-space calibration
  int calibration_n = 129;
  double margin = 1.25;
  double delta = 0.1;
  std::vector<double> x0;
  int seeds = 50;
  int fields = 10;
};

struct AcfConfig {
  std::string pair = "halfplane";  // halfplane | sector | files | truncate
  std::string psi1, psi2;
  std::vector<double> seed1, seed2;  // truncate: one point in each component
  double level = 0.05;
  double r_min = 0.1;
  double r_max = 0.9;
  int count = 9;
  double tol = 0.02;
};

struct BhiConfig {
  BhiSettings settings;
  std::vector<double> P;   // default: argmax of phi over B_{R/2}
  std::vector<double> x0;  // center of the oscillation ladder, default origin
  std::string u_data = "cos";
  std::string v_data = "sin2";
  std::vector<double> u_component, v_component;
  std::string w_data = "spikes";
  double M_cfg = 100.0;
  double C_max = 1024.0;
};

struct ReportConfig {
  int n_src = 257;
  std::vector<int> n_out{129, 257};
  std::vector<std::string> entries;  // empty: every corpus entry
  int chain_seeds = 50;
  int fields = 10;
  int sub_super_trials = 24;
};

struct Config {
  std::uint64_t seed = 1;
  std::string output = "out";
  int dim = 2;
  int n = 129;
  DomainConfig domain;
  Thresholds thresholds;
  SolverSettings solver;
  std::string solve_data = "one";
  FbSettings freeboundary;
  ChainConfig chain;
  AcfConfig acf;
  BhiConfig bhi;
  ReportConfig report;
};

/// Overrides are "dotted.key=value" with value parsed as YAML.
Config parse_config(const std::string& text, const std::string& source, const std::vector<std::string>& overrides = {});
Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Named sphere data for solves: one, halfspace, halfspace-tilted, cos, sin2, spikes.
std::function<double(const Point&)> sphere_function(const std::string& name);
const std::vector<std::string>& sphere_function_names();

/// Every key with its value, as YAML.
std::string to_yaml(const Config& config);
std::string default_config_yaml();

}  // namespace harnack::cli
