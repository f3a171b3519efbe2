#pragma once

#include <memory>
#include <vector>

#include "hplab/fock.hpp"
#include "hplab/moll.hpp"

namespace hplab {

/// Everything needed to build the mollified free fields at one eps.
struct FieldConfig {
  std::shared_ptr<const FockBasis> basis;
  Mollifier mollifier;
  Damper damper;
  double eps = 0.1;
  double tau = 0.0;

  const ModeSet& modes() const { return basis->modes(); }
  /// F(eps |k|) per mode.
  std::vector<double> weights() const;
  /// True when every retained mode sits on the mollifier plateau.
  bool plateau_regime() const;
};

FieldConfig make_field_config(std::shared_ptr<const FockBasis> basis, Mollifier mollifier,
                              Damper damper, double eps, double tau = 0.0);

/// Box-discretized positive-frequency kernel: c_k = F(eps k) exp(-i(k.x - k0 t)) / (2 k0 sqrt(V)),
/// i.e. the coefficients of Delta_eps(xi - x, t_xi - t) on the plane waves
/// exp(i(k.xi - k0 t_xi)) / sqrt(V).
struct KernelCoeffs {
  std::vector<Complex> coeffs;
  std::vector<double> frequency;
};

KernelCoeffs delta_plus_coeffs(const FieldConfig& cfg, const Vec3& x, double t);

/// Occupation-basis amplitudes fed to a+ for phi0: the Klein-Gordon pairing of
/// the kernel with the KG-normalized mode functions, sqrt(2 k0) c_k.
OneParticleVector field_amplitudes(const FieldConfig& cfg, const Vec3& x, double t);
/// d/dt of field_amplitudes: (+i k0) times.
OneParticleVector momentum_amplitudes(const FieldConfig& cfg, const Vec3& x, double t);
/// d/dx_mu of field_amplitudes: (-i k_mu) times.
OneParticleVector gradient_amplitudes(const FieldConfig& cfg, const Vec3& x, double t, int mu);
/// Laplacian of field_amplitudes: (-|k|^2) times.
OneParticleVector laplacian_amplitudes(const FieldConfig& cfg, const Vec3& x, double t);

FockOperator phi0(const FieldConfig& cfg, const Vec3& x, double t);
FockOperator pi0(const FieldConfig& cfg, const Vec3& x, double t);
SparseOperator phi0_sparse(const FieldConfig& cfg, const Vec3& x, double t);
SparseOperator pi0_sparse(const FieldConfig& cfg, const Vec3& x, double t);

/// (1/V) sum_k F(eps k)^2 exp(i k.r).
Complex delta_eps_kernel(const FieldConfig& cfg, const Vec3& r);

/// Positive-frequency solution sum_k f_k exp(i(k.xi - k0 t)) / sqrt(V); the
/// coefficients are taken at t = 0.
struct PositiveFrequencyExpansion {
  std::vector<Complex> coeffs;
};

/// Klein-Gordon pairing i int (f* d_t g - d_t f* g) on the equal-time slice t,
/// evaluated in mode space.
Complex kg_pair(const ModeSet& modes, const PositiveFrequencyExpansion& f,
                const PositiveFrequencyExpansion& g, double t);

struct CcrResidual {
  double phi_phi = 0.0;
  double pi_pi = 0.0;
  double phi_pi = 0.0;
  Complex delta{};  ///< delta_eps_kernel(x - x') used as the oracle
};

/// Equal-time commutators restricted to safe_subspace(margin).
CcrResidual ccr_check(const FieldConfig& cfg, const Vec3& x, const Vec3& xp, double t, int margin);

/// Diagonal translation exp(-i sum_k n_k k.a) in the occupation basis.
FockOperator translation(const FockBasis& basis, const Vec3& a);

}  // namespace hplab
