#include "hplab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <omp.h>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "hplab/average.hpp"
#include "hplab/digest.hpp"
#include "hplab/errors.hpp"

#ifndef HPLAB_VERSION
#define HPLAB_VERSION "unknown"
#endif

namespace hplab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  Csv(const std::string& fingerprint, std::vector<std::string> header) {
    body_ = "# config_sha256=" + fingerprint + "\n";
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ += (i ? "," : "") + csv_field(cells[i]);
    body_ += "\n";
  }
  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

std::string occupation_string(const Occupation& occ) {
  std::string s;
  for (std::size_t i = 0; i < occ.size(); ++i) s += (i ? " " : "") + std::to_string(occ[i]);
  return s;
}

class Context {
 public:
  Context(const RunConfig& cfg, std::string dir, std::ostream& log)
      : cfg_(cfg), dir_(std::move(dir)), log_(log), hash_(config_hash(cfg)) {}

  const RunConfig& cfg() const { return cfg_; }
  const std::string& hash() const { return hash_; }
  std::ostream& log() { return log_; }

  bool wants(const std::string& format) const {
    const auto& f = cfg_.output.formats;
    return std::find(f.begin(), f.end(), format) != f.end();
  }

  void emit(ExperimentRecord& rec, const std::string& name, const std::string& data) {
    write_atomic((fs::path(dir_) / name).string(), data);
    rec.files.push_back(name);
  }
  void emit_csv(ExperimentRecord& rec, const std::string& name, const Csv& csv) {
    if (wants("csv")) emit(rec, name, csv.str());
  }
  void emit_json(ExperimentRecord& rec, const std::string& name, const json& j) {
    if (wants("json")) emit(rec, name, j.dump(2) + "\n");
  }
  const std::string& dir() const { return dir_; }

  std::shared_ptr<const FockBasis> basis() const {
    return std::make_shared<const FockBasis>(build_modeset(cfg_), cfg_.model.N_max, cfg_.limits.capacity);
  }
  FieldConfig field(std::shared_ptr<const FockBasis> b, double eps) const {
    return make_field_config(std::move(b), build_mollifier(cfg_), build_damper(cfg_), eps, cfg_.model.tau);
  }
  QuadratureGrid grid(const ModeSet& ms) const {
    return make_quadrature_grid(ms, cfg_.model.N, cfg_.model.quadrature_points);
  }

 private:
  const RunConfig& cfg_;
  std::string dir_;
  std::ostream& log_;
  std::string hash_;
};

void check(ExperimentRecord& rec, bool ok, const std::string& what) {
  if (!ok) rec.failures.push_back(what);
}

// ---------------------------------------------------------------- genfunc

ExperimentRecord genfunc_demo(Context& ctx) {
  ExperimentRecord rec{"genfunc-demo", {}, {}, 0.0};
  const RunConfig& c = ctx.cfg();
  const Mollifier m(make_plateau_profile(c.mollifier.r_inner, c.mollifier.r_outer), 1);
  const GridSpec grid = build_genfunc_grid(c);
  const EpsilonLadder ladder = build_genfunc_ladder(c);
  const DerivativeRule rule = build_rule(c);

  const Representative h0 = heaviside_rep(m, grid);
  const Representative H(grid, h0.tag(), [h0](double e) { return h0(e); }, rule);
  const Representative D = gf_derivative(H);
  const double span = grid.hi - grid.lo;
  const double mid = 0.5 * (grid.lo + grid.hi);
  const std::vector<TestFunction> bumps{
      bump_test("bump_centered", mid, 0.35 * span, 1.0),
      bump_test("bump_offset", mid + 0.05 * span, 0.3 * span, -0.7),
      bump_test("bump_narrow", mid - 0.05 * span, 0.2 * span, 0.5),
  };
  const std::vector<TestFunction> window{window_test("window", 0.25 * span, 0.45 * span)};

  struct Case {
    std::string name;
    Representative a, b;
    const std::vector<TestFunction>* tests;
    bool expect_associated;
  };
  const Representative H2 = gf_power(H, 2);
  const std::vector<Case> cases{
      {"H^2~H", H2, H, &bumps, true},
      {"H^3~H", gf_power(H, 3), H, &bumps, true},
      {"2HH'~H'", Complex(2.0) * (H * D), D, &bumps, true},
      {"3H^2H'~H'", Complex(3.0) * (H2 * D), D, &bumps, true},
      {"d(H^2)~d(H)", gf_derivative(H2), D, &bumps, true},
      {"H^2H'~HH'", H2 * D, H * D, &window, false},
  };

  Csv csv(ctx.hash(), {"test_name", "eps", "pairing_re", "pairing_im"});
  json verdicts = json::object();
  json details = json::array();
  for (const auto& cs : cases) {
    const AssociationReport r = associate(cs.a, cs.b, ladder, *cs.tests);
    for (std::size_t t = 0; t < r.tests.size(); ++t) {
      for (std::size_t j = 0; j < r.eps.size(); ++j) {
        csv.row({cs.name + "/" + r.tests[t], num(r.eps[j]), num(r.pairings[t][j].real()),
                 num(r.pairings[t][j].imag())});
      }
    }
    verdicts[cs.name] = std::string(to_string(r.verdict));
    json d{{"case", cs.name},
           {"verdict", to_string(r.verdict)},
           {"slope", r.slope},
           {"limit_re", r.limit.real()},
           {"limit_im", r.limit.imag()}};
    details.push_back(d);
    if (cs.expect_associated) {
      check(rec, r.verdict == Verdict::associated && r.slope >= 0.5, cs.name + " expected associated");
    } else {
      check(rec, r.verdict == Verdict::not_associated, cs.name + " expected not-associated");
      check(rec, std::abs(std::abs(r.limit) - 1.0 / 6.0) <= 1e-3, cs.name + " limit gap not 1/6");
    }
  }

  // (H^2 - H) H' integrates to -1/6 at every rung.
  json sixth = json::array();
  const Representative diff = H2 - H;
  for (double e : ladder.values()) {
    const Complex p = trapezoid(grid, diff(e), D(e));
    csv.row({"(H^2-H)H'", num(e), num(p.real()), num(p.imag())});
    sixth.push_back({{"eps", e}, {"pairing", p.real()}});
    check(rec, std::abs(p - Complex(-1.0 / 6.0)) <= 1e-6, "(H^2-H)H' pairing off -1/6 at eps " + num(e));
  }

  json summary{{"config_sha256", ctx.hash()},
               {"associated(H^2,H)", verdicts["H^2~H"] == "associated"},
               {"verdicts", verdicts},
               {"cases", details},
               {"minus_one_sixth", sixth}};
  ctx.emit_csv(rec, "genfunc.csv", csv);
  ctx.emit_json(rec, "genfunc_verdict.json", summary);
  return rec;
}

// ---------------------------------------------------------------- ccr

void describe_basis(const FockBasis& b, std::ostream& os) {
  const ModeSet& ms = b.modes();
  os << "modes: " << ms.size() << " (d=" << ms.dim << ", L=" << num(ms.length) << ", n_max=" << ms.n_max
     << ", m=" << num(ms.mass) << ")\n";
  for (int k = 0; k < ms.size(); ++k) {
    os << "  mode " << k << ": n=(";
    for (int i = 0; i < ms.dim; ++i) os << (i ? "," : "") << ms.lattice[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    os << ") k0=" << num(ms.energies[static_cast<std::size_t>(k)]) << "\n";
  }
  os << "N_max: " << b.max_particles() << "\nbasis states: " << b.size() << "\n";
  for (int n = 0; n <= b.max_particles(); ++n) {
    os << "  layer " << n << ": " << (b.layer_end(n) - b.layer_end(n - 1)) << " states\n";
  }
}

ExperimentRecord ccr_check_run(Context& ctx, bool describe) {
  ExperimentRecord rec{"ccr-check", {}, {}, 0.0};
  const RunConfig& c = ctx.cfg();
  const auto basis = ctx.basis();
  if (describe) describe_basis(*basis, ctx.log());
  const EpsilonLadder ladder = build_ladder(c);
  const double L = c.model.length;
  constexpr int kLattice = 5;
  Csv csv(ctx.hash(), {"x", "x_prime", "eps", "residual_phi_phi", "residual_pi_pi", "residual_ccr"});
  double worst = 0.0;
  for (double e : ladder.values()) {
    const FieldConfig fc = ctx.field(basis, e);
    for (int i = 0; i < kLattice; ++i) {
      for (int j = 0; j < kLattice; ++j) {
        const Vec3 x{-0.5 * L + i * L / kLattice, 0.0, 0.0};
        const Vec3 xp{-0.5 * L + j * L / kLattice, 0.0, 0.0};
        const CcrResidual r = ccr_check(fc, x, xp, c.model.tau, 1);
        csv.row({num(x[0]), num(xp[0]), num(e), num(r.phi_phi), num(r.pi_pi), num(r.phi_pi)});
        worst = std::max({worst, r.phi_phi, r.pi_pi, r.phi_pi});
      }
    }
  }
  check(rec, worst < 1e-10, "CCR residual " + num(worst) + " >= 1e-10");
  ctx.emit_csv(rec, "ccr.csv", csv);
  ctx.emit_json(rec, "ccr.json", json{{"config_sha256", ctx.hash()}, {"max_residual", worst}, {"basis_states", basis->size()}});
  return rec;
}

// ---------------------------------------------------------------- spectrum

ExperimentRecord free_spectrum_run(Context& ctx) {
  ExperimentRecord rec{"free-spectrum", {}, {}, 0.0};
  const RunConfig& c = ctx.cfg();
  const auto basis = ctx.basis();
  const FieldConfig fc = ctx.field(basis, c.ladder.eps0);
  const QuadratureGrid grid = ctx.grid(basis->modes());
  const FockOperator h0 = free_h(fc, grid);
  Eigen::SelfAdjointEigenSolver<FockOperator> es(h0, Eigen::EigenvaluesOnly);
  std::vector<double> tower = free_tower(fc);
  std::sort(tower.begin(), tower.end());
  Csv csv(ctx.hash(), {"index", "eigenvalue", "analytic", "abs_error"});
  double worst = 0.0;
  for (std::size_t i = 0; i < tower.size(); ++i) {
    const double ev = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    const double err = std::abs(ev - tower[i]);
    worst = std::max(worst, err);
    csv.row({std::to_string(i), num(ev), num(tower[i]), num(err)});
  }
  if (!c.damper.enabled) check(rec, worst < 1e-8, "free spectrum deviates by " + num(worst));
  ctx.emit_csv(rec, "free_spectrum.csv", csv);
  ctx.emit_json(rec, "free_spectrum.json",
                json{{"config_sha256", ctx.hash()},
                     {"eps", c.ladder.eps0},
                     {"plateau_regime", fc.plateau_regime()},
                     {"vacuum_energy", free_vacuum_energy(fc)},
                     {"max_abs_error", worst},
                     {"analytic_asserted", !c.damper.enabled}});
  return rec;
}

// ---------------------------------------------------------------- s-matrix

FockVector state_vector(const FockBasis& b, const std::string& pattern, const std::string& key) {
  const Occupation occ = parse_occupation(pattern, b.modes().size());
  const auto idx = b.index_of(occ);
  if (!idx) throw ConfigError(key, "state '" + pattern + "' exceeds N_max");
  return basis_vector(b, *idx);
}

std::vector<std::pair<std::string, FockVector>> final_states(const FockBasis& b, const std::string& finals) {
  std::vector<std::pair<std::string, FockVector>> out;
  if (finals == "all") {
    for (std::size_t i = 0; i < b.size(); ++i) out.emplace_back(occupation_string(b.state(i)), basis_vector(b, i));
    return out;
  }
  std::stringstream ss(finals);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    FockVector v = state_vector(b, item, "schedule.finals");
    out.emplace_back(occupation_string(parse_occupation(item, b.modes().size())), std::move(v));
  }
  return out;
}

ExperimentRecord s_matrix_run(Context& ctx) {
  ExperimentRecord rec{"s-matrix", {}, {}, 0.0};
  const RunConfig& c = ctx.cfg();
  const auto basis = ctx.basis();
  const FieldConfig fc = ctx.field(basis, c.ladder.eps0);
  const Dynamics dyn(fc, build_spec(c), ctx.grid(basis->modes()));
  const FockVector phi1 = state_vector(*basis, c.schedule.initial, "schedule.initial");
  const auto finals = final_states(*basis, c.schedule.finals);

  Csv csv(ctx.hash(), {"t", "tau", "eps", "g", "final", "re", "im", "probability"});
  json per_t = json::array();
  for (double dt : c.schedule.t_minus_tau) {
    const double t = c.model.tau + dt;
    const SMatrixResult s = dyn.s_operator(t);
    const FockOperator id = FockOperator::Identity(s.op.rows(), s.op.cols());
    const double unitarity = (s.op.adjoint() * s.op - id).norm();
    check(rec, unitarity < 1e-10, "S not unitary at t-tau=" + num(dt) + ": " + num(unitarity));
    double total = 0.0;
    for (const auto& [label, phi2] : finals) {
      const Complex amp = fock_inner(phi2, s.op * phi1);
      const double p = transition_probability(s, phi1, phi2);
      total += p;
      csv.row({num(t), num(s.tau), num(c.ladder.eps0), num(c.model.g), label, num(amp.real()), num(amp.imag()), num(p)});
    }
    if (c.schedule.finals == "all") {
      check(rec, std::abs(total - phi1.squaredNorm()) < 1e-10,
            "probabilities sum to " + num(total) + " at t-tau=" + num(dt));
    }
    per_t.push_back({{"t_minus_tau", dt}, {"unitarity_defect", unitarity}, {"probability_sum", total}});
  }
  ctx.emit_csv(rec, "s_matrix.csv", csv);
  ctx.emit_json(rec, "s_matrix.json",
                json{{"config_sha256", ctx.hash()},
                     {"fingerprint", config_fingerprint(fc, build_spec(c))},
                     {"initial", c.schedule.initial},
                     {"schedule", per_t}});
  return rec;
}

// ---------------------------------------------------------------- sweep

ExperimentRecord epsilon_sweep_run(Context& ctx) {
  ExperimentRecord rec{"epsilon-sweep", {}, {}, 0.0};
  const RunConfig& c = ctx.cfg();
  const auto basis = ctx.basis();
  std::vector<double> eps;
  for (int j = 0; j < c.sweep.points; ++j) eps.push_back(1.0 / ((j + 1) * c.sweep.du));
  const EpsilonLadder ladder(eps);
  const FockVector phi1 = state_vector(*basis, c.schedule.initial, "schedule.initial");
  FockVector phi2 = phi1;
  if (c.schedule.finals != "all") phi2 = final_states(*basis, c.schedule.finals).front().second;
  const FieldConfig base = ctx.field(basis, eps.front());
  const EpsilonSweep sw = sweep_transition(base, build_spec(c), ctx.grid(basis->modes()),
                                           c.model.tau + c.sweep.t_minus_tau, phi1, phi2, ladder);

  Csv csv(ctx.hash(), {"u", "eps", "value"});
  for (std::size_t j = 0; j < sw.values.size(); ++j) csv.row({num(sw.u[j]), num(sw.eps[j]), num(sw.values[j])});
  const MeanEstimate mean = cesaro_mean(sw.values, c.sweep.du);
  const double u_span = c.sweep.du * (c.sweep.points - 1);
  const ApReport ap = ap_diagnostic(sw.values, c.sweep.du, 10.0 * c.sweep.du, 0.5 * u_span);
  const double bound = phi1.squaredNorm() * phi2.squaredNorm();
  for (double v : sw.values) check(rec, v >= -1e-12 && v <= bound + 1e-10, "transition probability out of range");
  check(rec, mean.band_lo <= mean.value && mean.value <= mean.band_hi, "Cesaro estimate outside its band");

  json means = json::array();
  for (std::size_t i = 0; i < mean.horizons.size(); ++i) means.push_back({mean.horizons[i], mean.partial_means[i]});
  ctx.emit_csv(rec, "sweep.csv", csv);
  ctx.emit_json(rec, "sweep_mean.json",
                json{{"config_sha256", ctx.hash()},
                     {"u_origin", c.sweep.du},
                     {"mean", mean.value},
                     {"band", {mean.band_lo, mean.band_hi}},
                     {"partial_means", means},
                     {"ap_diagnostic", {{"best_period", ap.best_period}, {"translation_defect", ap.translation_defect}, {"conclusive", false}}}});
  return rec;
}

json manifest(const RunConfig& cfg, const std::string& dir, const std::vector<ExperimentRecord>& recs) {
  json exps = json::array();
  for (const auto& r : recs) {
    json files = json::array();
    for (const auto& f : r.files) {
      std::ifstream in(fs::path(dir) / f, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      files.push_back({{"name", f}, {"bytes", ss.str().size()}, {"sha256", sha256_hex(ss.str())}});
    }
    exps.push_back({{"name", r.name}, {"passed", r.failures.empty()}, {"failures", r.failures},
                    {"seconds", r.seconds}, {"files", files}});
  }
  return json{{"code_version", HPLAB_VERSION},
              {"config_sha256", config_hash(cfg)},
              {"config", to_ini(cfg)},
              {"experiments", exps}};
}

void error_record(std::ostream& err, int status, const std::string& kind, const std::string& message,
                  const std::string& key = {}) {
  json j{{"status", status}, {"kind", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  err << j.dump() << "\n";
}

}  // namespace

void write_atomic(const std::string& path, const std::string& data) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << data;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string resolve_output_dir(const RunConfig& cfg, const RunOptions& opts) {
  if (!opts.output_dir.empty()) return opts.output_dir;
  if (const char* env = std::getenv("HPLAB_OUTPUT_DIR"); env && *env) return env;
  return cfg.output.directory;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("HPLAB_THREADS"); env && *env) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

std::vector<ExperimentRecord> run_experiments(const std::string& subcommand, const RunConfig& cfg,
                                              const RunOptions& opts, std::ostream& log) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    throw ConfigError("", "unknown subcommand '" + subcommand + "'");
  }
  const std::string dir = resolve_output_dir(cfg, opts);
  fs::create_directories(dir);
  Context ctx(cfg, dir, log);
  std::vector<ExperimentRecord> recs;
  auto timed = [&](const std::string& name, auto fn) {
    if (subcommand != "all" && subcommand != name) return;
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << name << ": " << (r.failures.empty() ? "ok" : "FAILED") << " (" << num(r.seconds) << " s)\n";
    recs.push_back(std::move(r));
  };
  timed("genfunc-demo", [&] { return genfunc_demo(ctx); });
  timed("ccr-check", [&] { return ccr_check_run(ctx, opts.describe); });
  timed("free-spectrum", [&] { return free_spectrum_run(ctx); });
  timed("s-matrix", [&] { return s_matrix_run(ctx); });
  timed("epsilon-sweep", [&] { return epsilon_sweep_run(ctx); });
  write_atomic((fs::path(dir) / "manifest.json").string(), manifest(cfg, dir, recs).dump(2) + "\n");
  return recs;
}

int run_command(const std::string& subcommand, const std::string& config_path, const RunOptions& opts,
                std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    validate_config(cfg);
    apply_thread_cap();
    const auto recs = run_experiments(subcommand, cfg, opts, out);
    json failures = json::array();
    for (const auto& r : recs) {
      for (const auto& f : r.failures) failures.push_back({{"experiment", r.name}, {"assertion", f}});
    }
    if (!failures.empty()) {
      err << json{{"status", kExitAssertion}, {"kind", "assertion"}, {"failures", failures}}.dump() << "\n";
      return kExitAssertion;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    error_record(err, kExitConfig, e.kind(), e.what(), e.key());
    return kExitConfig;
  } catch (const CapacityError& e) {
    error_record(err, kExitCapacity, e.kind(), e.what());
    return kExitCapacity;
  } catch (const ParameterError& e) {
    error_record(err, kExitConfig, e.kind(), e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    error_record(err, kExitAssertion, "error", e.what());
    return kExitAssertion;
  }
}

int validate_command(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    validate_config(cfg);
    const auto& m = cfg.model;
    const int modes = static_cast<int>(std::lround(std::pow(2 * m.n_max + 1, m.dim)));
    const std::size_t states = FockBasis::count(modes, m.N_max);
    const std::size_t workspace = FockBasis::count(modes, m.N_max + density_headroom(m.N));
    const int p = m.quadrature_points == 0 ? min_quadrature_points(m.n_max, m.N) : m.quadrature_points;
    json warnings = json::array();
    if (states > cfg.limits.capacity) {
      warnings.push_back("capacity: " + std::to_string(states) + " basis states exceed limits.capacity = " +
                         std::to_string(cfg.limits.capacity));
    }
    if (workspace > cfg.limits.workspace) {
      warnings.push_back("capacity: operator workspace of " + std::to_string(workspace) +
                         " states exceeds limits.workspace = " + std::to_string(cfg.limits.workspace));
    }
    const double dense_bytes = 16.0 * static_cast<double>(states) * static_cast<double>(states);
    json report{{"config_sha256", config_hash(cfg)},
                {"valid", true},
                {"modes", modes},
                {"basis_states", states},
                {"workspace_states", workspace},
                {"quadrature_points_per_axis", p},
                {"dense_operator_bytes", dense_bytes},
                {"warnings", warnings}};
    out << report.dump(2) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    error_record(err, kExitConfig, e.kind(), e.what(), e.key());
    return kExitConfig;
  } catch (const std::exception& e) {
    error_record(err, kExitConfig, "config", e.what());
    return kExitConfig;
  }
}

}  // namespace hplab
