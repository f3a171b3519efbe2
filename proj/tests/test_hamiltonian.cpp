#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hplab/errors.hpp"
#include "hplab/hamiltonian.hpp"
#include "support.hpp"

using namespace hplab;
using namespace hplab::testing;

namespace {

// P phi^p P built densely on a basis with p extra particles, which is more
// than any intermediate state can reach.
FockOperator truncated_power(const FieldConfig& cfg, const Vec3& y, int p) {
  const FockBasis big(cfg.modes(), cfg.basis->max_particles() + p);
  const OneParticleVector alpha = field_amplitudes(cfg, y, cfg.tau);
  const FockOperator phi = a_plus(alpha, big) + a_minus(alpha, big);
  FockOperator acc = FockOperator::Identity(phi.rows(), phi.cols());
  for (int i = 0; i < p; ++i) acc = acc * phi;
  const auto n = static_cast<Eigen::Index>(cfg.basis->size());
  return acc.topLeftCorner(n, n);
}

double rel(const FockOperator& a, const FockOperator& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("quadrature grid") {
  const ModeSet ms = make_modeset(1, kTwoPi, 2, 1.0);
  CHECK(min_quadrature_points(2, 3) == 17);
  const QuadratureGrid g = make_quadrature_grid(ms, 3);
  CHECK(g.points_per_axis == 17);
  CHECK(g.points.size() == 17);
  CHECK(g.weight == doctest::Approx(kTwoPi / 17));
  CHECK(g.points.front()[0] == doctest::Approx(-std::numbers::pi));
  CHECK(g.points.back()[0] < std::numbers::pi);
  CHECK_THROWS_AS(make_quadrature_grid(ms, 3, 16), ParameterError);
  CHECK(make_quadrature_grid(make_modeset(2, 1.0, 1, 1.0), 3).points.size() == 81);
}

TEST_CASE("interaction spec validation") {
  CHECK_THROWS_AS(InteractionSpec({0.1, 1, false}).validate(), ParameterError);
  CHECK_NOTHROW(InteractionSpec({0.1, 2, false}).validate());
}

TEST_CASE("free Hamiltonian is diagonal with the mollified tower") {
  for (double eps : {0.1, 0.6, 0.9}) {
    const FieldConfig cfg = default_field(eps);
    const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
    const FockOperator h0 = free_h(cfg, grid);
    CHECK(hermiticity_defect(h0) == 0.0);
    const std::vector<double> tower = free_tower(cfg);
    double err = 0.0;
    for (Eigen::Index i = 0; i < h0.rows(); ++i) {
      for (Eigen::Index j = 0; j < h0.cols(); ++j) {
        const Complex want = i == j ? Complex(tower[static_cast<std::size_t>(i)]) : Complex(0.0);
        err = std::max(err, std::abs(h0(i, j) - want));
      }
    }
    CHECK(err < 1e-8);
    // Independent vacuum energy: (1/2) sum_k k0 F(eps k)^2.
    double evac = 0.0;
    for (int k = 0; k < cfg.modes().size(); ++k) {
      const double f = cfg.mollifier.profile(eps * cfg.modes().k_abs(k));
      evac += 0.5 * cfg.modes().energies[static_cast<std::size_t>(k)] * f * f;
    }
    CHECK(free_vacuum_energy(cfg) == doctest::Approx(evac).epsilon(1e-14));
    CHECK(std::abs(h0(0, 0) - evac) < 1e-12);
    const FockOperator n = number_operator(*cfg.basis);
    CHECK((h0 * n - n * h0).norm() < 1e-10);
    const FockVector v = h0 * vacuum(*cfg.basis);
    CHECK((v - evac * vacuum(*cfg.basis)).norm() < 1e-12);
    CHECK(std::abs(free_h(cfg, grid, true)(0, 0)) == 0.0);
  }
}

TEST_CASE("free mode energies on the plateau are k0") {
  const FieldConfig cfg = default_field(0.1);
  const auto w = free_mode_energies(cfg);
  for (int k = 0; k < cfg.modes().size(); ++k) CHECK(w[static_cast<std::size_t>(k)] == cfg.modes().energies[static_cast<std::size_t>(k)]);
}

TEST_CASE("interaction term against a dense truncated power") {
  const FieldConfig cfg = make_field_config(basis(1, 3), mollifier(), Damper{}, 0.4);
  for (int N : {2, 3}) {
    const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), N);
    const double g = 0.37;
    const FockOperator h0 = assemble_h(cfg, {0.0, N, false}, grid);
    const FockOperator h = assemble_h(cfg, {g, N, false}, grid);
    FockOperator oracle = FockOperator::Zero(h.rows(), h.cols());
    for (const Vec3& y : grid.points) oracle += grid.weight * truncated_power(cfg, y, N + 1);
    oracle *= g / (N + 1);
    CHECK(rel(h - h0, oracle) < 1e-12);
    CHECK(hermiticity_defect(h) == 0.0);
    // Linear in g.
    const FockOperator h2 = assemble_h(cfg, {2 * g, N, false}, grid);
    CHECK(rel(h2 - h0, 2.0 * (h - h0)) < 1e-12);
  }
}

TEST_CASE("single-mode quartic oscillator") {
  // One k = 0 mode: H = m (n + 1/2) + g / (16 m^2 V) (a + a+)^4 on the truncated space.
  const double m = 1.3, L = 2.0, g = 0.8;
  const int N_max = 6;
  const auto b = std::make_shared<const FockBasis>(make_modeset(1, L, 0, m), N_max);
  const FieldConfig cfg = make_field_config(b, mollifier(), Damper{}, 0.1);
  const FockOperator h = assemble_h(cfg, {g, 3, false}, make_quadrature_grid(cfg.modes(), 3));
  const int big = N_max + 8;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(big + 1, big + 1);
  for (int n = 0; n < big; ++n) x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
  const Eigen::MatrixXd x4 = x * x * x * x;
  for (int i = 0; i <= N_max; ++i) {
    for (int j = 0; j <= N_max; ++j) {
      double want = g / (16.0 * m * m * L) * x4(i, j);
      if (i == j) want += m * (i + 0.5);
      CHECK(std::abs(h(i, j) - want) < 1e-12);
    }
  }
}

TEST_CASE("refining the quadrature does not change H") {
  const FieldConfig cfg = default_field(0.3);
  const InteractionSpec spec{0.3, 3, false};
  const FockOperator a = assemble_h(cfg, spec, make_quadrature_grid(cfg.modes(), 3));
  const FockOperator b = assemble_h(cfg, spec, make_quadrature_grid(cfg.modes(), 3, 34));
  CHECK(rel(a, b) < 1e-12);
}

TEST_CASE("damper on its plateau changes nothing") {
  const FieldConfig off = default_field(0.1);
  const FieldConfig on = make_field_config(off.basis, off.mollifier, Damper{make_plateau_profile(1, 2), true}, 0.1);
  const QuadratureGrid grid = make_quadrature_grid(off.modes(), 3);
  const InteractionSpec spec{0.3, 3, false};
  CHECK((assemble_h(off, spec, grid) - assemble_h(on, spec, grid)).norm() == 0.0);
  // Off the plateau the damper removes weight.
  const FieldConfig cut = make_field_config(off.basis, off.mollifier, Damper{make_plateau_profile(1, 2), true}, 0.5);
  const FieldConfig cut_off = default_field(0.5);
  CHECK((assemble_h(cut, spec, grid) - assemble_h(cut_off, spec, grid)).norm() > 1e-3);
}

TEST_CASE("parallel assembly matches the serial reference") {
  const FieldConfig cfg = default_field(0.6);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  for (bool shift : {false, true}) {
    const InteractionSpec spec{0.3, 3, shift};
    CHECK(rel(assemble_h(cfg, spec, grid), assemble_h_serial(cfg, spec, grid)) < 1e-13);
  }
}

TEST_CASE("density integrates to the Hamiltonian") {
  const FieldConfig cfg = default_field(0.3);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  const InteractionSpec spec{0.3, 3, false};
  FockOperator sum = FockOperator::Zero(static_cast<Eigen::Index>(cfg.basis->size()), static_cast<Eigen::Index>(cfg.basis->size()));
  for (const Vec3& y : grid.points) sum += grid.weight * h_density(cfg, spec, y, 0.0);
  CHECK(rel(0.5 * (sum + sum.adjoint()), assemble_h(cfg, spec, grid)) < 1e-13);
}

TEST_CASE("interaction Hamiltonian at tau is H - H0") {
  const FieldConfig cfg = default_field(0.3);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  for (bool shift : {false, true}) {
    const InteractionSpec spec{0.3, 3, shift};
    const FockOperator diff = assemble_h(cfg, spec, grid) - free_h(cfg, grid, shift);
    CHECK(rel(interaction_h(cfg, spec, grid, cfg.tau), diff) < 1e-12);
  }
}

TEST_CASE("grid and workspace errors") {
  const FieldConfig cfg = default_field();
  const QuadratureGrid small = make_quadrature_grid(cfg.modes(), 2);
  CHECK_THROWS_AS(assemble_h(cfg, {0.3, 3, false}, small), ParameterError);
  QuadratureGrid wrong = make_quadrature_grid(make_modeset(1, 3.0, 2, 1.0), 3);
  CHECK_THROWS_AS(assemble_h(cfg, {0.3, 3, false}, wrong), ShapeError);
  CHECK_THROWS_AS(CompressedAlgebra(*cfg.basis, 2, 200), CapacityError);
  CHECK_THROWS_AS(CompressedAlgebra(*cfg.basis, 0), ParameterError);
  CHECK(density_headroom(2) == 1);
  CHECK(density_headroom(3) == 2);
  CHECK(density_headroom(5) == 3);
}
