#include "hplab/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Eigenvalues>

#include "hplab/digest.hpp"
#include "hplab/errors.hpp"

namespace hplab {

namespace {

int resolve_margin(const InteractionSpec& spec, int margin) { return margin < 0 ? spec.N + 2 : margin; }

// Frobenius norm of A restricted to the given columns of the (unitary) frame.
double restricted_in_frame(const FockOperator& a, const FockOperator& frame,
                           std::span<const std::size_t> cols) {
  double acc = 0.0;
  for (std::size_t c : cols) acc += (a * frame.col(static_cast<Eigen::Index>(c))).squaredNorm();
  return std::sqrt(acc);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Propagator::Propagator(FockOperator h, double tau) : h_(std::move(h)), tau_(tau) {
  if (h_.rows() != h_.cols()) throw ShapeError("Hamiltonian must be square");
  const double scale = std::max(1.0, h_.norm());
  if (hermiticity_defect(h_) > 1e-10 * scale) {
    throw ContractError("propagator needs a Hermitian generator");
  }
  Eigen::SelfAdjointEigenSolver<FockOperator> es(h_);
  if (es.info() != Eigen::Success) throw ContractError("eigendecomposition failed");
  lambda_ = es.eigenvalues();
  q_ = es.eigenvectors();
}

FockOperator Propagator::evolve(double t) const {
  const double s = t - tau_;
  if (s == 0.0) return FockOperator::Identity(h_.rows(), h_.cols());
  Eigen::VectorXcd phase(lambda_.size());
  for (Eigen::Index i = 0; i < lambda_.size(); ++i) phase[i] = std::polar(1.0, -s * lambda_[i]);
  return q_ * phase.asDiagonal() * q_.adjoint();
}

double Propagator::reconstruction_error() const {
  return (q_ * lambda_.cast<Complex>().asDiagonal() * q_.adjoint() - h_).norm();
}

FockOperator evolve(const Propagator& p, double t) { return p.evolve(t); }

std::string config_fingerprint(const FieldConfig& cfg, const InteractionSpec& spec) {
  const ModeSet& ms = cfg.modes();
  std::ostringstream os;
  os << "mollifier " << fmt(cfg.mollifier.profile.r_inner()) << ' ' << fmt(cfg.mollifier.profile.r_outer())
     << " dim " << cfg.mollifier.dim << "\ndamper " << cfg.damper.enabled << ' '
     << fmt(cfg.damper.profile.r_inner()) << ' ' << fmt(cfg.damper.profile.r_outer()) << "\neps "
     << fmt(cfg.eps) << "\ntau " << fmt(cfg.tau) << "\nmodes " << ms.dim << ' ' << fmt(ms.length) << ' '
     << ms.n_max << ' ' << fmt(ms.mass) << "\nN_max " << cfg.basis->max_particles() << "\nspec "
     << fmt(spec.g) << ' ' << spec.N << ' ' << spec.vacuum_shift << '\n';
  return sha256_hex(os.str());
}

Dynamics::Dynamics(FieldConfig cfg, InteractionSpec spec, QuadratureGrid grid)
    : cfg_(std::move(cfg)),
      spec_(spec),
      grid_(std::move(grid)),
      full_(assemble_h(cfg_, spec_, grid_), cfg_.tau),
      free_(free_h(cfg_, grid_, spec_.vacuum_shift), cfg_.tau) {}

FockOperator Dynamics::heisenberg_field(const Vec3& x, double t) const {
  const FockOperator u = full_.evolve(t);
  return u.adjoint() * phi0(cfg_, x, cfg_.tau) * u;
}

FockOperator Dynamics::heisenberg_pi(const Vec3& x, double t) const {
  const FockOperator u = full_.evolve(t);
  return u.adjoint() * pi0(cfg_, x, cfg_.tau) * u;
}

FockOperator Dynamics::interaction_field(const Vec3& x, double t) const {
  const FockOperator u = free_.evolve(t);
  return u.adjoint() * phi0(cfg_, x, cfg_.tau) * u;
}

double Dynamics::heisenberg_eom_residual(const Vec3& x, double t, double h, int margin,
                                         bool momentum) const {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  const auto safe = safe_subspace(*cfg_.basis, resolve_margin(spec_, margin));
  auto field = [&](double s) { return momentum ? heisenberg_pi(x, s) : heisenberg_field(x, s); };
  const FockOperator a = field(t);
  const FockOperator& hm = full_.hamiltonian();
  const FockOperator r = (field(t + h) - field(t - h)) / (2.0 * h) - Complex(0.0, 1.0) * (hm * a - a * hm);
  return restricted_norm(r, safe);
}

FieldEquationResidual Dynamics::field_equation_residual(const SmearingFunction& xi, double t, double h,
                                                        int margin) const {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  const auto safe = safe_subspace(*cfg_.basis, resolve_margin(spec_, margin));
  const std::size_t np = grid_.points.size();
  const double m2 = cfg_.modes().mass * cfg_.modes().mass;
  const double tau = cfg_.tau;

  std::vector<double> xi_raw(np), xi_moll(np, 0.0);
  for (std::size_t j = 0; j < np; ++j) xi_raw[j] = xi(grid_.points[j]);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) {
      Vec3 r{};
      for (std::size_t a = 0; a < 3; ++a) r[a] = grid_.points[i][a] - grid_.points[j][a];
      xi_moll[j] += grid_.weight * xi_raw[i] * delta_eps_kernel(cfg_, r).real();
    }
  }

  // Smeared pi at tau; d_t commutes with the smearing.
  const Eigen::Index dim = static_cast<Eigen::Index>(cfg_.basis->size());
  FockOperator pi_xi = FockOperator::Zero(dim, dim);
  for (std::size_t j = 0; j < np; ++j) pi_xi += grid_.weight * xi_raw[j] * FockOperator(pi0_sparse(cfg_, grid_.points[j], tau));

  // Right-hand side lap(phi) - m^2 phi - g phi^N at tau, smeared with either weight.
  const CompressedAlgebra alg(*cfg_.basis, std::max(1, spec_.N / 2));
  FockOperator rhs_moll = FockOperator::Zero(dim, dim);
  FockOperator rhs_raw = FockOperator::Zero(dim, dim);
  for (std::size_t j = 0; j < np; ++j) {
    const Vec3& y = grid_.points[j];
    const OneParticleVector alpha = field_amplitudes(cfg_, y, tau);
    FockOperator term = FockOperator(field_combination(laplacian_amplitudes(cfg_, y, tau), *cfg_.basis)) -
                        m2 * FockOperator(field_combination(alpha, *cfg_.basis));
    if (spec_.g != 0.0) term -= spec_.g * alg.power(alg.field(alpha), spec_.N);
    const double chi = cfg_.damper.value(cfg_.eps, y, grid_.dim);
    rhs_moll += (grid_.weight * chi * xi_moll[j]) * term;
    rhs_raw += (grid_.weight * xi_raw[j]) * term;
  }

  const FockOperator u = full_.evolve(t);
  auto at = [&](const FockOperator& a, double s) {
    const FockOperator us = full_.evolve(s);
    return FockOperator(us.adjoint() * a * us);
  };
  const FockOperator dpi = (-at(pi_xi, t + 2 * h) + 8.0 * at(pi_xi, t + h) - 8.0 * at(pi_xi, t - h) +
                            at(pi_xi, t - 2 * h)) /
                           (12.0 * h);
  const FockOperator frame = u.adjoint();
  FieldEquationResidual out;
  out.smeared_mollified = restricted_in_frame(dpi - at(rhs_moll, t), frame, safe);
  out.smeared_raw = restricted_in_frame(dpi - at(rhs_raw, t), frame, safe);
  return out;
}

SMatrixResult Dynamics::s_operator(double t) const {
  SMatrixResult r;
  r.op = free_.evolve(t).adjoint() * full_.evolve(t);
  r.tau = cfg_.tau;
  r.t = t;
  r.fingerprint = config_fingerprint(cfg_, spec_);
  return r;
}

double Dynamics::conjugation_residual(const Vec3& x, double t) const {
  const FockOperator s = s_operator(t).op;
  return (heisenberg_field(x, t) - s.adjoint() * interaction_field(x, t) * s).norm();
}

FockOperator Dynamics::interaction_hamiltonian(double t) const {
  return interaction_h(cfg_, spec_, grid_, t);
}

double Dynamics::s_ode_residual(double t, double h) const {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  const FockOperator ds = (s_operator(t + h).op - s_operator(t - h).op) / (2.0 * h);
  return (ds + Complex(0.0, 1.0) * interaction_hamiltonian(t) * s_operator(t).op).norm();
}

double dyson_first_order_residual(const FieldConfig& cfg, const InteractionSpec& spec,
                                  const QuadratureGrid& grid, double t, double dg) {
  if (!(dg > 0.0)) throw ParameterError("coupling step must be positive");
  InteractionSpec plus = spec, minus = spec, unit = spec;
  plus.g = dg;
  minus.g = -dg;
  unit.g = 1.0;
  const FockOperator sp = Dynamics(cfg, plus, grid).s_operator(t).op;
  const FockOperator sm = Dynamics(cfg, minus, grid).s_operator(t).op;
  const FockOperator dsdg = (sp - sm) / (2.0 * dg);

  // H_I(s) = U0(s)^+ (H - H0) U0(s) at unit coupling, with one assembly.
  const Dynamics at_unit(cfg, unit, grid);
  const FockOperator v = at_unit.full().hamiltonian() - at_unit.free().hamiltonian();
  auto h_int = [&](double s) {
    const FockOperator u0 = at_unit.free().evolve(s);
    return FockOperator(u0.adjoint() * v * u0);
  };

  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();
  const double span = t - cfg.tau;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(span) / 0.25)));
  const double width = span / panels;
  FockOperator integral = FockOperator::Zero(sp.rows(), sp.cols());
  for (int p = 0; p < panels; ++p) {
    const double mid = cfg.tau + (p + 0.5) * width;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double half = 0.5 * width;
      const double w = weights[i] * half;
      integral += w * h_int(mid + half * nodes[i]);
      if (nodes[i] != 0.0) integral += w * h_int(mid - half * nodes[i]);
    }
  }
  return (dsdg + Complex(0.0, 1.0) * integral).norm();
}

double transition_probability(const SMatrixResult& s, const FockVector& phi1, const FockVector& phi2) {
  if (phi1.size() != s.op.cols() || phi2.size() != s.op.rows()) {
    throw ShapeError("state does not match the S-operator basis");
  }
  return std::norm(fock_inner(phi2, s.op * phi1));
}

}  // namespace hplab
