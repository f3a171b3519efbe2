#include "hplab/average.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

constexpr std::size_t kMinSamples = 1000;
constexpr int kPerDecade = 100;

void require_samples(const std::vector<double>& samples, double du) {
  if (!(du > 0.0)) throw ParameterError("sample step must be positive");
  if (samples.size() < kMinSamples) {
    throw ResolutionError("need at least " + std::to_string(kMinSamples) + " samples, got " +
                          std::to_string(samples.size()));
  }
}

FieldConfig at_eps(const FieldConfig& base, double eps) {
  FieldConfig c = base;
  c.eps = eps;
  return c;
}

// Everything that distinguishes two rungs numerically.
std::vector<double> rung_key(const FieldConfig& cfg, const QuadratureGrid& grid) {
  std::vector<double> key = cfg.weights();
  for (const auto& y : grid.points) key.push_back(cfg.damper.value(cfg.eps, y, grid.dim));
  return key;
}

double rung_value(const FieldConfig& cfg, const InteractionSpec& spec, const QuadratureGrid& grid,
                  double t, const FockVector& phi1, const FockVector& phi2, std::string* fp) {
  const Dynamics dyn(cfg, spec, grid);
  const SMatrixResult s = dyn.s_operator(t);
  *fp = s.fingerprint;
  return transition_probability(s, phi1, phi2);
}

}  // namespace

MeanEstimate cesaro_mean(const std::vector<double>& samples, double du) {
  require_samples(samples, du);
  const std::size_t n = samples.size();
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) cumulative[j] = cumulative[j - 1] + 0.5 * du * (samples[j - 1] + samples[j]);

  const double t_max = static_cast<double>(n - 1) * du;
  MeanEstimate out;
  const int steps = 3 * kPerDecade;
  std::size_t last = 0;
  for (int i = 0; i <= steps; ++i) {
    const double target = t_max * std::pow(10.0, -3.0 + static_cast<double>(i) / kPerDecade);
    auto j = static_cast<std::size_t>(std::llround(target / du));
    j = std::clamp<std::size_t>(j, 1, n - 1);
    if (j <= last) continue;
    last = j;
    const double horizon = static_cast<double>(j) * du;
    out.horizons.push_back(horizon);
    out.partial_means.push_back(cumulative[j] / horizon);
  }
  double sum = 0.0;
  std::size_t count = 0;
  out.band_lo = out.band_hi = out.partial_means.back();
  for (std::size_t i = 0; i < out.horizons.size(); ++i) {
    if (out.horizons[i] < 0.1 * t_max * (1.0 - 1e-12)) continue;
    sum += out.partial_means[i];
    ++count;
    out.band_lo = std::min(out.band_lo, out.partial_means[i]);
    out.band_hi = std::max(out.band_hi, out.partial_means[i]);
  }
  out.value = sum / static_cast<double>(count);
  return out;
}

EpsilonSweep sweep_transition(const FieldConfig& base, const InteractionSpec& spec,
                              const QuadratureGrid& grid, double t, const FockVector& phi1,
                              const FockVector& phi2, const EpsilonLadder& ladder) {
  const auto& eps = ladder.values();
  const std::size_t n = eps.size();
  std::vector<std::vector<double>> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = rung_key(at_eps(base, eps[i]), grid);

  // First rung carrying each distinct key is the representative.
  std::vector<std::size_t> rep(n);
  std::vector<std::size_t> unique;
  std::map<std::vector<double>, std::size_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = seen.emplace(keys[i], i);
    rep[i] = it->second;
    if (inserted) unique.push_back(i);
  }

  std::vector<double> value(n, 0.0);
  std::vector<std::string> fps(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long u = 0; u < static_cast<long>(unique.size()); ++u) {
    const std::size_t i = unique[static_cast<std::size_t>(u)];
    value[i] = rung_value(at_eps(base, eps[i]), spec, grid, t, phi1, phi2, &fps[i]);
  }

  EpsilonSweep out;
  for (std::size_t i = 0; i < n; ++i) {
    out.eps.push_back(eps[i]);
    out.u.push_back(1.0 / eps[i]);
    out.values.push_back(value[rep[i]]);
    out.fingerprints.push_back(rep[i] == i ? fps[i] : config_fingerprint(at_eps(base, eps[i]), spec));
  }
  return out;
}

EpsilonSweep sweep_transition_serial(const FieldConfig& base, const InteractionSpec& spec,
                                     const QuadratureGrid& grid, double t, const FockVector& phi1,
                                     const FockVector& phi2, const EpsilonLadder& ladder) {
  EpsilonSweep out;
  for (double e : ladder.values()) {
    std::string fp;
    out.eps.push_back(e);
    out.u.push_back(1.0 / e);
    out.values.push_back(rung_value(at_eps(base, e), spec, grid, t, phi1, phi2, &fp));
    out.fingerprints.push_back(fp);
  }
  return out;
}

ApReport ap_diagnostic(const std::vector<double>& samples, double du, double p_min, double p_max) {
  require_samples(samples, du);
  const std::size_t n = samples.size();
  const auto s_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(p_min / du)));
  const auto s_hi = std::min(static_cast<std::size_t>(std::floor(p_max / du)), n / 2);
  if (s_lo > s_hi) throw ParameterError("no admissible translation in [p_min, p_max]");
  ApReport best{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t s = s_lo; s <= s_hi; ++s) {
    double defect = 0.0;
    for (std::size_t j = 0; j + s < n && defect < best.translation_defect; ++j) {
      defect = std::max(defect, std::abs(samples[j + s] - samples[j]));
    }
    if (defect < best.translation_defect) best = {static_cast<double>(s) * du, defect};
  }
  return best;
}

}  // namespace hplab
