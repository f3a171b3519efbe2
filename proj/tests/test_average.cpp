#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hplab/average.hpp"
#include "hplab/errors.hpp"
#include "support.hpp"

using namespace hplab;
using namespace hplab::testing;

namespace {

std::vector<double> sampled(double du, double t_max, double (*f)(double)) {
  std::vector<double> s;
  const auto n = static_cast<std::size_t>(std::llround(t_max / du)) + 1;
  for (std::size_t j = 0; j < n; ++j) s.push_back(f(static_cast<double>(j) * du));
  return s;
}

double exp_cos(double u) { return std::exp(std::cos(u)); }
double cosine(double u) { return std::cos(u); }

// Mean over one period by the periodic trapezoid rule, which converges
// geometrically for analytic periodic integrands.
double periodic_mean(double (*f)(double)) {
  const int n = 64;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += f(2.0 * std::numbers::pi * i / n);
  return acc / n;
}

}  // namespace

TEST_CASE("periodic mean oracle") {
  CHECK(periodic_mean(exp_cos) == doctest::Approx(1.2660658777520084).epsilon(1e-15));
  CHECK(periodic_mean(exp_cos) == doctest::Approx(std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-15));
}

TEST_CASE("Cesaro mean of exp(cos u)") {
  const MeanEstimate m = cesaro_mean(sampled(0.1, 1000.0, exp_cos), 0.1);
  CHECK(std::abs(m.value - periodic_mean(exp_cos)) < 1e-3);
  CHECK(m.band_lo <= m.value);
  CHECK(m.value <= m.band_hi);
  // Horizons that round to the same sample collapse.
  CHECK(m.horizons.size() <= 301);
  CHECK(m.horizons.size() > 250);
  CHECK(std::is_sorted(m.horizons.begin(), m.horizons.end()));
  CHECK(std::adjacent_find(m.horizons.begin(), m.horizons.end()) == m.horizons.end());
  CHECK(m.horizons.back() == doctest::Approx(1000.0));
  CHECK(m.horizons.front() == doctest::Approx(1.0));
  for (double p : m.partial_means) {
    CHECK(p >= std::exp(-1.0));
    CHECK(p <= std::exp(1.0));
  }
}

TEST_CASE("Cesaro mean of cos u and of a constant") {
  CHECK(std::abs(cesaro_mean(sampled(0.1, 1000.0, cosine), 0.1).value) < 1e-3);
  const MeanEstimate c = cesaro_mean(std::vector<double>(2000, 2.5), 0.5);
  CHECK(c.value == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(c.band_hi - c.band_lo < 1e-12);
}

TEST_CASE("Cesaro mean is linear and stable under a shift of origin") {
  const double du = 0.1;
  const auto a = sampled(du, 1000.0, exp_cos);
  const auto b = sampled(du, 1000.0, cosine);
  std::vector<double> mix(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 2.0 * a[i] - 3.0 * b[i];
  const double lhs = cesaro_mean(mix, du).value;
  const double rhs = 2.0 * cesaro_mean(a, du).value - 3.0 * cesaro_mean(b, du).value;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  const auto longer = sampled(du, 10000.0, exp_cos);
  std::vector<double> shifted;
  for (std::size_t j = 0; j < longer.size(); ++j) shifted.push_back(std::exp(std::cos(0.7 + static_cast<double>(j) * du)));
  CHECK(std::abs(cesaro_mean(shifted, du).value - cesaro_mean(longer, du).value) < 1e-3);
}

TEST_CASE("Cesaro mean input validation") {
  CHECK_THROWS_AS(cesaro_mean(std::vector<double>(999, 1.0), 0.1), ResolutionError);
  CHECK_THROWS_AS(cesaro_mean(std::vector<double>(2000, 1.0), 0.0), ParameterError);
}

TEST_CASE("almost-periodicity diagnostic") {
  const double du = 0.01;
  const auto s = sampled(du, 100.0, cosine);
  const ApReport r = ap_diagnostic(s, du, 1.0, 10.0);
  CHECK(std::abs(r.best_period - 2.0 * std::numbers::pi) <= du);
  CHECK(r.translation_defect < 1e-2);
  const ApReport c = ap_diagnostic(std::vector<double>(2000, 1.0), 0.1, 1.0, 5.0);
  CHECK(c.translation_defect == 0.0);
  CHECK_THROWS_AS(ap_diagnostic(s, du, 5.0, 1.0), ParameterError);
}

TEST_CASE("epsilon sweep") {
  const FieldConfig base = default_field();
  const QuadratureGrid grid = make_quadrature_grid(base.modes(), 3);
  const FockBasis& b = *base.basis;
  const EpsilonLadder ladder({0.8, 0.2, 0.1, 0.05});

  SUBCASE("free theory keeps the vacuum") {
    const EpsilonSweep s = sweep_transition(base, {0.0, 3, false}, grid, 2.0, vacuum(b), vacuum(b), ladder);
    for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < s.eps.size(); ++i) CHECK(s.u[i] == doctest::Approx(1.0 / s.eps[i]));
  }

  SUBCASE("plateau rungs agree and parallel equals serial") {
    const InteractionSpec spec{0.3, 3, false};
    // Two k = 0 quanta: reachable from the vacuum by the quartic term.
    const FockVector target = basis_vector(b, *b.index_of({0, 0, 2, 0, 0}));
    const EpsilonSweep p = sweep_transition(base, spec, grid, 2.0, vacuum(b), target, ladder);
    const EpsilonSweep q = sweep_transition_serial(base, spec, grid, 2.0, vacuum(b), target, ladder);
    REQUIRE(p.values.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(p.values[i] == doctest::Approx(q.values[i]).epsilon(1e-13));
      CHECK(p.fingerprints[i] == q.fingerprints[i]);
    }
    // eps = 0.2, 0.1, 0.05 all sit on the plateau for |k| <= 2.
    CHECK(std::abs(q.values[1] - q.values[2]) < 1e-12);
    CHECK(std::abs(q.values[2] - q.values[3]) < 1e-12);
    CHECK(std::abs(q.values[0] - q.values[1]) > 1e-8);
  }
}

TEST_CASE("S-matrix is independent of the plateau mollifier") {
  const auto b = basis(2, 4);
  const InteractionSpec spec{0.3, 3, false};
  const FieldConfig c1 = make_field_config(b, mollifier(1.0, 2.0), Damper{}, 0.1);
  const FieldConfig c2 = make_field_config(b, mollifier(1.5, 3.5), Damper{}, 0.1);
  const QuadratureGrid grid = make_quadrature_grid(c1.modes(), 3);
  const FockOperator s1 = Dynamics(c1, spec, grid).s_operator(5.0).op;
  const FockOperator s2 = Dynamics(c2, spec, grid).s_operator(5.0).op;
  CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-12);
}
