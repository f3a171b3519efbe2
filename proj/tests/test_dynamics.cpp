#include <doctest.h>

#include <cmath>
#include <random>

#include "hplab/errors.hpp"
#include "hplab/dynamics.hpp"
#include "support.hpp"

using namespace hplab;
using namespace hplab::testing;

namespace {

Dynamics model(double g, double eps = 0.1, bool shift = false) {
  const FieldConfig cfg = default_field(eps);
  const InteractionSpec spec{g, 3, shift};
  return Dynamics(cfg, spec, make_quadrature_grid(cfg.modes(), 3));
}

double unitarity(const FockOperator& u) { return (u.adjoint() * u - identity_like(u)).norm(); }

}  // namespace

TEST_CASE("propagator") {
  std::mt19937_64 rng(1);
  FockOperator h(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i) h.col(i) = random_vector(rng, 6);
  h = 0.5 * (h + h.adjoint()).eval();
  const Propagator p(h, 0.5);
  CHECK((p.evolve(0.5) - identity_like(h)).norm() == 0.0);
  CHECK(unitarity(p.evolve(3.0)) < 1e-13);
  CHECK((p.evolve(1.2) * p.evolve(2.0) - p.evolve(2.7)).norm() < 1e-12);
  CHECK(p.reconstruction_error() < 1e-13);
  // Small step against the series 1 - i dt H - dt^2 H^2 / 2.
  const double dt = 1e-4;
  const FockOperator series = identity_like(h) - Complex(0, dt) * h - 0.5 * dt * dt * h * h;
  CHECK((evolve(p, 0.5 + dt) - series).norm() < 1e-10);
  FockOperator bad = h;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(Propagator(bad, 0.0), ContractError);
}

TEST_CASE("free Heisenberg field is the free field at later time") {
  const Dynamics d = model(0.0);
  for (double t : {0.0, 0.7, 3.0}) {
    const Vec3 x{0.4, 0, 0};
    CHECK((d.heisenberg_field(x, t) - phi0(d.config(), x, t)).norm() < 1e-12);
    const FockOperator pi = pi0(d.config(), x, t);
    CHECK((d.heisenberg_pi(x, t) - pi).norm() < 1e-12 * pi.norm());
    CHECK((d.interaction_field(x, t) - phi0(d.config(), x, t)).norm() < 1e-12);
  }
}

TEST_CASE("interacting Heisenberg field at tau") {
  const Dynamics d = model(0.3);
  CHECK((d.heisenberg_field({0.2, 0, 0}, 0.0) - phi0(d.config(), {0.2, 0, 0}, 0.0)).norm() < 1e-14);
}

TEST_CASE("Heisenberg equation holds to second order in the step") {
  // The default margin N + 2 needs N_max >= 5.
  const FieldConfig cfg = make_field_config(basis(1, 7), mollifier(), Damper{}, 0.3);
  const Dynamics d(cfg, {0.3, 3, false}, make_quadrature_grid(cfg.modes(), 3));
  for (bool momentum : {false, true}) {
    const double a = d.heisenberg_eom_residual({0.2, 0, 0}, 1.0, 0.02, -1, momentum);
    const double b = d.heisenberg_eom_residual({0.2, 0, 0}, 1.0, 0.01, -1, momentum);
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.02));
  }
  CHECK_THROWS_AS(d.heisenberg_eom_residual({0, 0, 0}, 0.0, 0.0), ParameterError);
}

TEST_CASE("S operator basics") {
  const Dynamics free = model(0.0);
  CHECK((free.s_operator(2.0).op - identity_like(free.s_operator(2.0).op)).norm() < 1e-12);
  const Dynamics d = model(0.2);
  CHECK((d.s_operator(0.0).op - identity_like(d.s_operator(0.0).op)).norm() == 0.0);
  for (double t : {1.0, 5.0, 20.0}) CHECK(unitarity(d.s_operator(t).op) < 1e-12);
  const auto s = d.s_operator(1.0);
  CHECK(s.fingerprint == config_fingerprint(d.config(), d.spec()));
  CHECK(s.fingerprint.size() == 64);
  CHECK(s.fingerprint != model(0.3).s_operator(1.0).fingerprint);
  CHECK(s.fingerprint != model(0.2, 0.05).s_operator(1.0).fingerprint);
}

TEST_CASE("conjugation by S maps interaction to Heisenberg picture") {
  const Dynamics d = model(0.3);
  for (double t : {1.0, 5.0}) CHECK(d.conjugation_residual({0.3, 0, 0}, t) < 1e-10);
}

TEST_CASE("interaction Hamiltonian is the free-rotated perturbation") {
  for (bool shift : {false, true}) {
    const Dynamics d = model(0.3, 0.1, shift);
    const FockOperator v = d.full().hamiltonian() - d.free().hamiltonian();
    for (double t : {0.5, 2.0}) {
      const FockOperator u0 = d.free().evolve(t);
      const FockOperator want = u0.adjoint() * v * u0;
      CHECK((d.interaction_hamiltonian(t) - want).norm() < 1e-10 * want.norm());
    }
  }
}

TEST_CASE("S solves the interaction-picture equation") {
  const Dynamics d = model(0.3);
  const double a = d.s_ode_residual(2.0, 0.02);
  const double b = d.s_ode_residual(2.0, 0.01);
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("first-order Dyson term") {
  const FieldConfig cfg = default_field();
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  for (double t : {1.0, 2.0}) CHECK(dyson_first_order_residual(cfg, {0.0, 3, false}, grid, t) < 1e-4);
  CHECK_THROWS_AS(dyson_first_order_residual(cfg, {0.0, 3, false}, grid, 1.0, 0.0), ParameterError);
}

TEST_CASE("transition probabilities") {
  const Dynamics d = model(0.3);
  const auto s = d.s_operator(5.0);
  const FockBasis& b = *d.config().basis;
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double p = transition_probability(s, vacuum(b), basis_vector(b, j));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0 + 1e-12);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(transition_probability(model(0.0).s_operator(5.0), vacuum(b), vacuum(b)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smeared field equation") {
  // Needs N_max >= N + 2 so that the transported safe frame is non-trivial.
  const auto b = basis(1, 7);
  const FieldConfig cfg = make_field_config(b, mollifier(), Damper{}, 0.3);
  const InteractionSpec spec{0.1, 3, false};
  const Dynamics d(cfg, spec, make_quadrature_grid(cfg.modes(), 3));
  const SmearingFunction xi = [](const Vec3& y) { return std::exp(-y[0] * y[0]); };
  for (double t : {0.0, 0.8}) {
    const FieldEquationResidual r = d.field_equation_residual(xi, t, 1e-3);
    CHECK(r.smeared_mollified < 1e-8);
  }
  // Raw smearing is exact only when all modes are on the plateau at eps and at 2 eps.
  const FieldConfig wide = make_field_config(b, mollifier(), Damper{}, 1.2);
  const Dynamics dw(wide, spec, make_quadrature_grid(wide.modes(), 3));
  const FieldEquationResidual r = dw.field_equation_residual(xi, 0.0, 1e-3);
  CHECK(r.smeared_mollified < 1e-8);
  CHECK(r.smeared_raw > 1e-3);
}
