#include "hplab/field.hpp"

#include <cmath>
#include <string>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

double dot(const Vec3& a, const Vec3& b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
  return acc;
}

// Frobenius norm of the listed columns of a sparse operator, with `diag`
// subtracted on the diagonal.
double restricted_sparse_norm(const SparseOperator& a, std::span<const std::size_t> cols,
                              Complex diag = {}) {
  double acc = 0.0;
  for (std::size_t c : cols) {
    const auto col = static_cast<Eigen::Index>(c);
    bool seen_diag = false;
    for (SparseOperator::InnerIterator it(a, col); it; ++it) {
      Complex v = it.value();
      if (it.row() == col) {
        v -= diag;
        seen_diag = true;
      }
      acc += std::norm(v);
    }
    if (!seen_diag) acc += std::norm(diag);
  }
  return std::sqrt(acc);
}

}  // namespace

std::vector<double> FieldConfig::weights() const {
  const ModeSet& ms = modes();
  std::vector<double> w(static_cast<std::size_t>(ms.size()));
  for (int k = 0; k < ms.size(); ++k) w[static_cast<std::size_t>(k)] = mollifier.weight(eps, ms.k_abs(k));
  return w;
}

bool FieldConfig::plateau_regime() const {
  const ModeSet& ms = modes();
  for (int k = 0; k < ms.size(); ++k) {
    if (!mollifier.on_plateau(eps, ms.k_abs(k))) return false;
  }
  return true;
}

FieldConfig make_field_config(std::shared_ptr<const FockBasis> basis, Mollifier mollifier,
                              Damper damper, double eps, double tau) {
  if (!basis) throw ParameterError("field config needs a basis");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (mollifier.dim != basis->modes().dim) {
    throw ParameterError("mollifier dimension " + std::to_string(mollifier.dim) +
                         " does not match mode-set dimension " + std::to_string(basis->modes().dim));
  }
  return FieldConfig{std::move(basis), mollifier, damper, eps, tau};
}

KernelCoeffs delta_plus_coeffs(const FieldConfig& cfg, const Vec3& x, double t) {
  const ModeSet& ms = cfg.modes();
  const double sqrt_v = std::sqrt(ms.volume());
  KernelCoeffs out;
  out.coeffs.resize(static_cast<std::size_t>(ms.size()));
  out.frequency = ms.energies;
  for (int k = 0; k < ms.size(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double k0 = ms.energies[kk];
    const double w = cfg.mollifier.weight(cfg.eps, ms.k_abs(k));
    const double phase = -(dot(ms.momenta[kk], x, ms.dim) - k0 * t);
    out.coeffs[kk] = std::polar(w / (2.0 * k0 * sqrt_v), phase);
  }
  return out;
}

OneParticleVector field_amplitudes(const FieldConfig& cfg, const Vec3& x, double t) {
  const KernelCoeffs c = delta_plus_coeffs(cfg, x, t);
  OneParticleVector a(static_cast<Eigen::Index>(c.coeffs.size()));
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    a[static_cast<Eigen::Index>(k)] = std::sqrt(2.0 * c.frequency[k]) * c.coeffs[k];
  }
  return a;
}

OneParticleVector momentum_amplitudes(const FieldConfig& cfg, const Vec3& x, double t) {
  OneParticleVector a = field_amplitudes(cfg, x, t);
  const auto& e = cfg.modes().energies;
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] *= Complex(0.0, e[static_cast<std::size_t>(k)]);
  return a;
}

OneParticleVector gradient_amplitudes(const FieldConfig& cfg, const Vec3& x, double t, int mu) {
  if (mu < 0 || mu >= cfg.modes().dim) throw ParameterError("gradient direction out of range");
  OneParticleVector a = field_amplitudes(cfg, x, t);
  const auto& km = cfg.modes().momenta;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    a[k] *= Complex(0.0, -km[static_cast<std::size_t>(k)][static_cast<std::size_t>(mu)]);
  }
  return a;
}

OneParticleVector laplacian_amplitudes(const FieldConfig& cfg, const Vec3& x, double t) {
  OneParticleVector a = field_amplitudes(cfg, x, t);
  const ModeSet& ms = cfg.modes();
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double kk = ms.k_abs(static_cast<int>(k));
    a[k] *= -kk * kk;
  }
  return a;
}

SparseOperator phi0_sparse(const FieldConfig& cfg, const Vec3& x, double t) {
  return field_combination(field_amplitudes(cfg, x, t), *cfg.basis);
}

SparseOperator pi0_sparse(const FieldConfig& cfg, const Vec3& x, double t) {
  return field_combination(momentum_amplitudes(cfg, x, t), *cfg.basis);
}

FockOperator phi0(const FieldConfig& cfg, const Vec3& x, double t) {
  return FockOperator(phi0_sparse(cfg, x, t));
}

FockOperator pi0(const FieldConfig& cfg, const Vec3& x, double t) {
  return FockOperator(pi0_sparse(cfg, x, t));
}

Complex delta_eps_kernel(const FieldConfig& cfg, const Vec3& r) {
  const ModeSet& ms = cfg.modes();
  Complex acc{};
  for (int k = 0; k < ms.size(); ++k) {
    const double w = cfg.mollifier.weight(cfg.eps, ms.k_abs(k));
    acc += std::polar(w * w, dot(ms.momenta[static_cast<std::size_t>(k)], r, ms.dim));
  }
  return acc / ms.volume();
}

Complex kg_pair(const ModeSet& modes, const PositiveFrequencyExpansion& f,
                const PositiveFrequencyExpansion& g, double t) {
  const auto m = static_cast<std::size_t>(modes.size());
  if (f.coeffs.size() != m || g.coeffs.size() != m) {
    throw ShapeError("expansions do not match the mode set");
  }
  // With f(t) = sum f_k e^{-i k0 t} u_k, both time derivatives bring -i k0 and
  // the slice integral collapses to sum 2 k0 f_k(t)* g_k(t).
  Complex acc{};
  for (std::size_t k = 0; k < m; ++k) {
    const double k0 = modes.energies[k];
    const Complex fk = f.coeffs[k] * std::polar(1.0, -k0 * t);
    const Complex gk = g.coeffs[k] * std::polar(1.0, -k0 * t);
    acc += 2.0 * k0 * std::conj(fk) * gk;
  }
  return acc;
}

CcrResidual ccr_check(const FieldConfig& cfg, const Vec3& x, const Vec3& xp, double t, int margin) {
  if (margin < 1) throw ParameterError("CCR check needs margin >= 1");
  const auto safe = safe_subspace(*cfg.basis, margin);
  const SparseOperator f1 = phi0_sparse(cfg, x, t);
  const SparseOperator f2 = phi0_sparse(cfg, xp, t);
  const SparseOperator p1 = pi0_sparse(cfg, x, t);
  const SparseOperator p2 = pi0_sparse(cfg, xp, t);

  Vec3 r{};
  for (int i = 0; i < 3; ++i) r[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - xp[static_cast<std::size_t>(i)];
  CcrResidual out;
  out.delta = delta_eps_kernel(cfg, r);
  const SparseOperator ff = SparseOperator(f1 * f2) - SparseOperator(f2 * f1);
  const SparseOperator pp = SparseOperator(p1 * p2) - SparseOperator(p2 * p1);
  const SparseOperator fp = SparseOperator(f1 * p2) - SparseOperator(p2 * f1);
  out.phi_phi = restricted_sparse_norm(ff, safe);
  out.pi_pi = restricted_sparse_norm(pp, safe);
  out.phi_pi = restricted_sparse_norm(fp, safe, Complex(0.0, 1.0) * out.delta);
  return out;
}

FockOperator translation(const FockBasis& basis, const Vec3& a) {
  const ModeSet& ms = basis.modes();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double phase = 0.0;
    for (int k = 0; k < ms.size(); ++k) {
      phase += basis.state(i)[static_cast<std::size_t>(k)] * dot(ms.momenta[static_cast<std::size_t>(k)], a, ms.dim);
    }
    diag[static_cast<Eigen::Index>(i)] = std::polar(1.0, -phase);
  }
  return diag.asDiagonal();
}

}  // namespace hplab
