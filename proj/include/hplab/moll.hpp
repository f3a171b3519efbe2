#pragma once

#include <array>
#include <span>
#include <vector>

namespace hplab {

using Vec3 = std::array<double, 3>;

double norm(const Vec3& v, int dim);

/// Radial plateau function: 1 on [0, r_inner], 0 on [r_outer, inf), and a
/// C-infinity monotone transition in between built from the bump quotient
///   B(r_outer - r) / (B(r - r_inner) + B(r_outer - r)),  B(s) = exp(-1/s).
class SpectralProfile {
 public:
  SpectralProfile(double r_inner, double r_outer);

  double r_inner() const noexcept { return r_inner_; }
  double r_outer() const noexcept { return r_outer_; }

  double operator()(double r) const noexcept;

 private:
  double r_inner_;
  double r_outer_;
};

/// Throws ParameterError unless 0 < r_inner < r_outer.
SpectralProfile make_plateau_profile(double r_inner, double r_outer);

/// Isotropic mollifier given through its Fourier symbol. The symbol is real
/// and even, so the position-space kernel is real.
struct Mollifier {
  SpectralProfile profile;
  int dim = 1;

  Mollifier(SpectralProfile p, int d = 1);

  /// Symbol evaluated at eps*|k|.
  double weight(double eps, double k_abs) const;

  /// True when eps*k_abs lies on the plateau, so the weight is exactly 1.
  bool on_plateau(double eps, double k_abs) const noexcept {
    return eps * k_abs <= profile.r_inner();
  }

  /// Radius (in units of eps) beyond which |kernel| of the eps = 1 kernel
  /// stays below `tol`. Found by scanning; the decay is sub-exponential.
  double support_radius(double tol) const;
};

double mollifier_weight(const Mollifier& m, double eps, const Vec3& k);

/// Position-space kernel of the symbol F(eps k), normalized to unit
/// integral, sampled at the given radial coordinates (signed x in d = 1).
/// Computed by Gauss-Legendre quadrature of the radial Fourier integral.
std::vector<double> position_kernel(const Mollifier& m, double eps,
                                    std::span<const double> grid);

/// Single-point evaluation; no resolution check.
double position_kernel_at(const Mollifier& m, double eps, double r);

/// Position-space damper chi(eps y). Disabled dampers are identically 1.
struct Damper {
  SpectralProfile profile{1.0, 2.0};
  bool enabled = false;

  double value(double eps, const Vec3& y, int dim) const;
};

}  // namespace hplab
