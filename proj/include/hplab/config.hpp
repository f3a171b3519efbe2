#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hplab/dynamics.hpp"
#include "hplab/genfunc.hpp"

namespace hplab {

struct ModelBlock {
  int dim = 1;
  double length = 6.283185307179586;
  int n_max = 2;
  int N_max = 4;
  double mass = 1.0;
  double g = 0.3;
  int N = 3;
  double tau = 0.0;
  bool vacuum_shift = false;
  int quadrature_points = 0;  ///< 0 selects the minimal admissible grid
};

struct RadiiBlock {
  double r_inner = 1.0;
  double r_outer = 2.0;
};

struct DamperBlock {
  bool enabled = false;
  double r_inner = 1.0;
  double r_outer = 2.0;
};

struct LadderBlock {
  double eps0 = 0.4;
  int rungs = 4;
};

struct GenfuncBlock {
  double lo = -1.0;
  double hi = 1.0;
  int n = 65536;
  double eps0 = 1.0 / 320.0;
  int rungs = 4;
  std::string rule = "spectral";
};

struct ScheduleBlock {
  std::vector<double> t_minus_tau{1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> fd_steps{0.02, 0.01, 0.005, 0.0025};
  std::string initial = "vacuum";  ///< "vacuum" or an occupation pattern "0 1 0 0 0"
  std::string finals = "all";      ///< "all" or patterns separated by ';'
};

struct SweepBlock {
  double du = 0.1;  ///< samples at u = (j+1) du, eps = 1/u
  int points = 1000;
  double t_minus_tau = 5.0;
};

struct OutputBlock {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct LimitsBlock {
  std::size_t capacity = kDefaultCapacity;
  std::size_t workspace = kWorkspaceCapacity;
};

struct RunConfig {
  ModelBlock model;
  RadiiBlock mollifier;
  DamperBlock damper;
  LadderBlock ladder;
  GenfuncBlock genfunc;
  ScheduleBlock schedule;
  SweepBlock sweep;
  OutputBlock output;
  LimitsBlock limits;
};

/// Parses an INI document. Unknown sections or keys and malformed values
/// raise ConfigError naming the dotted key. Does not validate.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Re-checks every numeric constraint of the owning modules; throws
/// ConfigError naming the offending key. Does not build bases.
void validate_config(const RunConfig& cfg);

/// Canonical INI rendering; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& cfg);

/// SHA-256 of to_ini.
std::string config_hash(const RunConfig& cfg);

ModeSet build_modeset(const RunConfig& cfg);
Mollifier build_mollifier(const RunConfig& cfg);
Damper build_damper(const RunConfig& cfg);
InteractionSpec build_spec(const RunConfig& cfg);
EpsilonLadder build_ladder(const RunConfig& cfg);
GridSpec build_genfunc_grid(const RunConfig& cfg);
EpsilonLadder build_genfunc_ladder(const RunConfig& cfg);
DerivativeRule build_rule(const RunConfig& cfg);

/// Parses "vacuum" or whitespace/comma separated occupations.
Occupation parse_occupation(const std::string& text, int modes);

}  // namespace hplab
