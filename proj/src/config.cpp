#include "hplab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hplab/digest.hpp"
#include "hplab/errors.hpp"

namespace hplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  long out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

std::size_t to_size(const std::string& key, const std::string& v) {
  const long n = to_long(key, v);
  if (n < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&, const std::string&)> set;
  std::function<std::string()> get;
};

template <class T, class Parse, class Show>
Field field(std::string sec, std::string key, T& ref, Parse parse, Show show) {
  return Field{std::move(sec), std::move(key),
               [&ref, parse](const std::string& k, const std::string& v) { ref = parse(k, v); },
               [&ref, show]() { return show(ref); }};
}

std::vector<Field> fields(RunConfig& c) {
  auto d = [](double v) { return fmt(v); };
  auto i = [](auto v) { return std::to_string(v); };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  auto s = [](const std::string& v) { return v; };
  auto str = [](const std::string&, const std::string& v) { return trim(v); };
  auto dl = [](const std::vector<double>& v) { return join(v); };
  auto sl = [](const std::vector<std::string>& v) { return join(v); };
  auto to_strs = [](const std::string&, const std::string& v) { return split(v, ','); };
  return {
      field("model", "dim", c.model.dim, to_int, i),
      field("model", "length", c.model.length, to_double, d),
      field("model", "n_max", c.model.n_max, to_int, i),
      field("model", "N_max", c.model.N_max, to_int, i),
      field("model", "mass", c.model.mass, to_double, d),
      field("model", "g", c.model.g, to_double, d),
      field("model", "N", c.model.N, to_int, i),
      field("model", "tau", c.model.tau, to_double, d),
      field("model", "vacuum_shift", c.model.vacuum_shift, to_bool, b),
      field("model", "quadrature_points", c.model.quadrature_points, to_int, i),
      field("mollifier", "r_inner", c.mollifier.r_inner, to_double, d),
      field("mollifier", "r_outer", c.mollifier.r_outer, to_double, d),
      field("damper", "enabled", c.damper.enabled, to_bool, b),
      field("damper", "r_inner", c.damper.r_inner, to_double, d),
      field("damper", "r_outer", c.damper.r_outer, to_double, d),
      field("ladder", "eps0", c.ladder.eps0, to_double, d),
      field("ladder", "rungs", c.ladder.rungs, to_int, i),
      field("genfunc", "lo", c.genfunc.lo, to_double, d),
      field("genfunc", "hi", c.genfunc.hi, to_double, d),
      field("genfunc", "n", c.genfunc.n, to_int, i),
      field("genfunc", "eps0", c.genfunc.eps0, to_double, d),
      field("genfunc", "rungs", c.genfunc.rungs, to_int, i),
      field("genfunc", "rule", c.genfunc.rule, str, s),
      field("schedule", "t_minus_tau", c.schedule.t_minus_tau, to_list, dl),
      field("schedule", "fd_steps", c.schedule.fd_steps, to_list, dl),
      field("schedule", "initial", c.schedule.initial, str, s),
      field("schedule", "finals", c.schedule.finals, str, s),
      field("sweep", "du", c.sweep.du, to_double, d),
      field("sweep", "points", c.sweep.points, to_int, i),
      field("sweep", "t_minus_tau", c.sweep.t_minus_tau, to_double, d),
      field("output", "directory", c.output.directory, str, s),
      field("output", "formats", c.output.formats, to_strs, sl),
      field("limits", "capacity", c.limits.capacity, to_size, i),
      field("limits", "workspace", c.limits.workspace, to_size, i),
  };
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "malformed config at line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  auto table = fields(cfg);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside any section");
    }
    bool known_section = false;
    for (const auto& f : table) known_section = known_section || f.section == section;
    if (!known_section) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      const std::string dotted = section + "." + key;
      auto it = std::find_if(table.begin(), table.end(),
                             [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == table.end()) throw ConfigError(dotted, "unknown key");
      it->set(dotted, value.data());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  const auto& m = c.model;
  require(m.dim >= 1 && m.dim <= 3, "model.dim", "must be 1, 2 or 3");
  require(m.length > 0.0 && std::isfinite(m.length), "model.length", "must be positive");
  require(m.n_max >= 0, "model.n_max", "must be non-negative");
  require(m.N_max >= 0, "model.N_max", "must be non-negative");
  require(m.mass > 0.0, "model.mass", "must be positive");
  require(std::isfinite(m.g), "model.g", "must be finite");
  require(m.N >= 2, "model.N", "must be >= 2");
  require(std::isfinite(m.tau), "model.tau", "must be finite");
  require(m.quadrature_points >= 0, "model.quadrature_points", "must be non-negative");
  if (m.quadrature_points > 0) {
    const int need = min_quadrature_points(m.n_max, m.N);
    require(m.quadrature_points >= need, "model.quadrature_points",
            "quadrature invariant P >= 2(N+1)n_max+1 = " + std::to_string(need) + " violated by P = " +
                std::to_string(m.quadrature_points));
  }
  require(c.mollifier.r_inner > 0.0, "mollifier.r_inner", "must be positive");
  require(c.mollifier.r_outer > c.mollifier.r_inner, "mollifier.r_outer", "must exceed r_inner");
  require(c.damper.r_inner > 0.0, "damper.r_inner", "must be positive");
  require(c.damper.r_outer > c.damper.r_inner, "damper.r_outer", "must exceed r_inner");
  require(c.ladder.eps0 > 0.0, "ladder.eps0", "must be positive");
  require(c.ladder.rungs >= 1, "ladder.rungs", "must be >= 1");
  require(c.genfunc.lo < 0.0 && c.genfunc.hi > 0.0, "genfunc.lo", "grid must contain 0 strictly inside");
  require(c.genfunc.n >= 16, "genfunc.n", "must be >= 16");
  require(c.genfunc.eps0 > 0.0, "genfunc.eps0", "must be positive");
  require(c.genfunc.rungs >= 3, "genfunc.rungs", "association needs >= 3 rungs");
  require(c.genfunc.rule == "spectral" || c.genfunc.rule == "finite_difference4", "genfunc.rule",
          "must be 'spectral' or 'finite_difference4'");
  require(!c.schedule.t_minus_tau.empty(), "schedule.t_minus_tau", "must list at least one time");
  require(c.schedule.fd_steps.size() >= 2, "schedule.fd_steps", "needs at least two steps");
  for (double h : c.schedule.fd_steps) require(h > 0.0, "schedule.fd_steps", "steps must be positive");
  const int modes = static_cast<int>(std::lround(std::pow(2 * m.n_max + 1, m.dim)));
  try {
    (void)parse_occupation(c.schedule.initial, modes);
  } catch (const Error& e) {
    throw ConfigError("schedule.initial", e.what());
  }
  if (c.schedule.finals != "all") {
    for (const auto& p : split(c.schedule.finals, ';')) {
      try {
        (void)parse_occupation(p, modes);
      } catch (const Error& e) {
        throw ConfigError("schedule.finals", e.what());
      }
    }
  }
  require(c.sweep.du > 0.0, "sweep.du", "must be positive");
  require(c.sweep.points >= 1000, "sweep.points", "Cesaro mean needs >= 1000 samples");
  require(std::isfinite(c.sweep.t_minus_tau), "sweep.t_minus_tau", "must be finite");
  require(!c.output.directory.empty(), "output.directory", "must not be empty");
  for (const auto& f : c.output.formats) {
    require(f == "csv" || f == "json", "output.formats", "unknown format '" + f + "'");
  }
  require(c.limits.capacity >= 1, "limits.capacity", "must be >= 1");
  require(c.limits.workspace >= c.limits.capacity, "limits.workspace", "must be >= limits.capacity");
}

std::string to_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  std::string section;
  for (const auto& f : fields(copy)) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(to_ini(cfg)); }

ModeSet build_modeset(const RunConfig& c) {
  return make_modeset(c.model.dim, c.model.length, c.model.n_max, c.model.mass);
}

Mollifier build_mollifier(const RunConfig& c) {
  return Mollifier(make_plateau_profile(c.mollifier.r_inner, c.mollifier.r_outer), c.model.dim);
}

Damper build_damper(const RunConfig& c) {
  return Damper{make_plateau_profile(c.damper.r_inner, c.damper.r_outer), c.damper.enabled};
}

InteractionSpec build_spec(const RunConfig& c) { return InteractionSpec{c.model.g, c.model.N, c.model.vacuum_shift}; }

EpsilonLadder build_ladder(const RunConfig& c) { return EpsilonLadder::geometric(c.ladder.eps0, c.ladder.rungs); }

GridSpec build_genfunc_grid(const RunConfig& c) { return make_grid(c.genfunc.lo, c.genfunc.hi, c.genfunc.n); }

EpsilonLadder build_genfunc_ladder(const RunConfig& c) {
  return EpsilonLadder::geometric(c.genfunc.eps0, c.genfunc.rungs);
}

DerivativeRule build_rule(const RunConfig& c) {
  return c.genfunc.rule == "finite_difference4" ? DerivativeRule::finite_difference4 : DerivativeRule::spectral;
}

Occupation parse_occupation(const std::string& text, int modes) {
  const std::string t = trim(text);
  if (t == "vacuum") return Occupation(static_cast<std::size_t>(modes), 0);
  Occupation occ;
  std::string normalized = t;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::string tok;
  while (in >> tok) {
    const long v = to_long("occupation", tok);
    if (v < 0) throw ParameterError("occupation numbers must be non-negative");
    occ.push_back(static_cast<int>(v));
  }
  if (static_cast<int>(occ.size()) != modes) {
    throw ShapeError("occupation pattern '" + t + "' has " + std::to_string(occ.size()) + " entries, expected " +
                     std::to_string(modes));
  }
  return occ;
}

}  // namespace hplab
