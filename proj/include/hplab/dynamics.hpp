#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hplab/hamiltonian.hpp"

namespace hplab {

/// exp(-i (t - tau) H) by Hermitian eigendecomposition.
class Propagator {
 public:
  Propagator(FockOperator h, double tau);

  double tau() const noexcept { return tau_; }
  const FockOperator& hamiltonian() const noexcept { return h_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  const FockOperator& eigenvectors() const noexcept { return q_; }

  FockOperator evolve(double t) const;
  /// ||Q diag(lambda) Q^+ - H||
  double reconstruction_error() const;

 private:
  FockOperator h_;
  double tau_;
  Eigen::VectorXd lambda_;
  FockOperator q_;
};

FockOperator evolve(const Propagator& p, double t);

struct SMatrixResult {
  FockOperator op;
  double tau = 0.0;
  double t = 0.0;
  std::string fingerprint;
};

/// SHA-256 over mollifier, damper, eps, tau, mode set, N_max and interaction.
std::string config_fingerprint(const FieldConfig& cfg, const InteractionSpec& spec);

struct FieldEquationResidual {
  double smeared_mollified = 0.0;
  double smeared_raw = 0.0;
};

using SmearingFunction = std::function<double(const Vec3&)>;

/// One model (fields, interaction, quadrature) with both propagators cached.
class Dynamics {
 public:
  Dynamics(FieldConfig cfg, InteractionSpec spec, QuadratureGrid grid);

  const FieldConfig& config() const noexcept { return cfg_; }
  const InteractionSpec& spec() const noexcept { return spec_; }
  const QuadratureGrid& grid() const noexcept { return grid_; }
  const Propagator& full() const noexcept { return full_; }
  const Propagator& free() const noexcept { return free_; }

  /// e^{i(t-tau)H} phi0(x, tau) e^{-i(t-tau)H}
  FockOperator heisenberg_field(const Vec3& x, double t) const;
  FockOperator heisenberg_pi(const Vec3& x, double t) const;
  /// Same conjugation with H0.
  FockOperator interaction_field(const Vec3& x, double t) const;

  /// ||(A(t+h) - A(t-h))/2h - i[H, A(t)]|| on safe_subspace(margin), A = phi or pi.
  /// margin < 0 selects N + 2.
  double heisenberg_eom_residual(const Vec3& x, double t, double h, int margin = -1,
                                 bool momentum = false) const;

  /// Smeared interacting-field equation. d_t pi by fourth-order central
  /// differences with step h. At t != tau the safe subspace is transported
  /// by the evolution, i.e. columns U(t)^+ e_j for safe j.
  FieldEquationResidual field_equation_residual(const SmearingFunction& xi, double t, double h,
                                                int margin = -1) const;

  SMatrixResult s_operator(double t) const;
  double conjugation_residual(const Vec3& x, double t) const;
  FockOperator interaction_hamiltonian(double t) const;
  double s_ode_residual(double t, double h) const;

 private:
  FieldConfig cfg_;
  InteractionSpec spec_;
  QuadratureGrid grid_;
  Propagator full_;
  Propagator free_;
};

/// ||d_g S|_{g=0} + i int_tau^t H_I(s) ds|| with d_g by central difference at
/// step dg and the s-integral by composite Gauss-Legendre. spec.g is ignored.
double dyson_first_order_residual(const FieldConfig& cfg, const InteractionSpec& spec,
                                  const QuadratureGrid& grid, double t, double dg = 1e-4);

/// |<phi2, S phi1>|^2
double transition_probability(const SMatrixResult& s, const FockVector& phi1, const FockVector& phi2);

}  // namespace hplab
