#pragma once

#include <string>
#include <vector>

#include "hplab/dynamics.hpp"
#include "hplab/genfunc.hpp"

namespace hplab {

struct MeanEstimate {
  std::vector<double> horizons;       ///< T values of the schedule
  std::vector<double> partial_means;  ///< (1/T) int_0^T f(u) du
  double value = 0.0;                 ///< mean of the partial means over the final decade
  double band_lo = 0.0;
  double band_hi = 0.0;
};

/// Samples f(j du), j = 0..n-1, so T_max = (n-1) du. Partial means by the
/// trapezoid rule on a geometric schedule of 100 horizons per decade over
/// [T_max/1000, T_max].
MeanEstimate cesaro_mean(const std::vector<double>& samples, double du);

struct EpsilonSweep {
  std::vector<double> eps;
  std::vector<double> u;  ///< 1/eps
  std::vector<double> values;
  std::vector<std::string> fingerprints;
};

/// transition_probability per rung with everything but eps frozen. Rungs whose
/// mollifier weights and damper values coincide share one computation.
EpsilonSweep sweep_transition(const FieldConfig& base, const InteractionSpec& spec,
                              const QuadratureGrid& grid, double t, const FockVector& phi1,
                              const FockVector& phi2, const EpsilonLadder& ladder);
/// Sequential reference without memoization.
EpsilonSweep sweep_transition_serial(const FieldConfig& base, const InteractionSpec& spec,
                                     const QuadratureGrid& grid, double t, const FockVector& phi1,
                                     const FockVector& phi2, const EpsilonLadder& ladder);

struct ApReport {
  double best_period = 0.0;
  double translation_defect = 0.0;
};

/// Scans translations p = s du for p in [p_min, p_max] and reports the one
/// minimizing sup |f(u+p) - f(u)| over the overlap. Heuristic only.
ApReport ap_diagnostic(const std::vector<double>& samples, double du, double p_min, double p_max);

}  // namespace hplab
