#include "hplab/moll.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

double bump(double s) noexcept { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

// Composite Gauss-Legendre on [a, b] with `panels` equal pieces.
template <class F>
double integrate(F&& f, double a, double b, int panels) {
  const auto& x = Gauss20::abscissa();
  const auto& w = Gauss20::weights();
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    }
    total += half * acc;
  }
  return total;
}

// Radial kernel of the Fourier integral in dimension d, argument u = q*s.
double radial_factor(int dim, double q, double s) {
  const double u = q * s;
  switch (dim) {
    case 1:
      return std::cos(u);
    case 2:
      return std::cyl_bessel_j(0.0, u) * q;
    default:
      return (u == 0.0 ? 1.0 : std::sin(u) / u) * q * q;
  }
}

double dimension_constant(int dim) {
  constexpr double pi = std::numbers::pi;
  switch (dim) {
    case 1:
      return 1.0 / pi;
    case 2:
      return 1.0 / (2.0 * pi);
    default:
      return 1.0 / (2.0 * pi * pi);
  }
}

// Kernel of the eps = 1 mollifier at dimensionless radius s.
double unit_kernel(const Mollifier& m, double s) {
  const double ri = m.profile.r_inner();
  const double ro = m.profile.r_outer();
  s = std::abs(s);
  const int inner_panels = 4 + static_cast<int>(std::ceil(ri * s / std::numbers::pi));
  const int outer_panels = 16 + static_cast<int>(std::ceil((ro - ri) * s / std::numbers::pi));
  const double plateau =
      integrate([&](double q) { return radial_factor(m.dim, q, s); }, 0.0, ri, inner_panels);
  const double transition = integrate(
      [&](double q) { return m.profile(q) * radial_factor(m.dim, q, s); }, ri, ro, outer_panels);
  return dimension_constant(m.dim) * (plateau + transition);
}

}  // namespace

double norm(const Vec3& v, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += v[i] * v[i];
  return std::sqrt(acc);
}

SpectralProfile::SpectralProfile(double r_inner, double r_outer)
    : r_inner_(r_inner), r_outer_(r_outer) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner)) {
    throw ParameterError("plateau profile requires 0 < r_inner < r_outer (got " +
                         std::to_string(r_inner) + ", " + std::to_string(r_outer) + ")");
  }
}

double SpectralProfile::operator()(double r) const noexcept {
  if (r <= r_inner_) return 1.0;
  if (r >= r_outer_) return 0.0;
  const double up = bump(r_outer_ - r);
  const double down = bump(r - r_inner_);
  return up / (up + down);
}

SpectralProfile make_plateau_profile(double r_inner, double r_outer) {
  return SpectralProfile(r_inner, r_outer);
}

Mollifier::Mollifier(SpectralProfile p, int d) : profile(p), dim(d) {
  if (d < 1 || d > 3) throw ParameterError("mollifier dimension must be 1, 2 or 3");
}

double Mollifier::weight(double eps, double k_abs) const {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  return profile(eps * k_abs);
}

double Mollifier::support_radius(double tol) const {
  // Scan outward and report the last excursion. The scan stops once a quiet
  // stretch as long as the radius found so far (and at least 64) has passed.
  constexpr double step = 0.25;
  constexpr double s_max = 4000.0;
  double last = 0.0;
  for (double s = 0.0; s <= s_max; s += step) {
    if (std::abs(unit_kernel(*this, s)) > tol) last = s;
    if (s > 2.0 * last + 64.0) break;
  }
  return last + step;
}

double mollifier_weight(const Mollifier& m, double eps, const Vec3& k) {
  return m.weight(eps, norm(k, m.dim));
}

double position_kernel_at(const Mollifier& m, double eps, double r) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  return unit_kernel(m, r / eps) / std::pow(eps, m.dim);
}

std::vector<double> position_kernel(const Mollifier& m, double eps,
                                    std::span<const double> grid) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  // The kernel is band-limited to |k| < r_outer / eps; the sampling step must
  // stay under the matching Nyquist spacing.
  const double nyquist_step = std::numbers::pi * eps / m.profile.r_outer();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - grid[i - 1]) > nyquist_step) {
      throw ResolutionError("grid spacing " + std::to_string(std::abs(grid[i] - grid[i - 1])) +
                            " exceeds pi*eps/r_outer = " + std::to_string(nyquist_step));
    }
  }
  std::vector<double> out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = position_kernel_at(m, eps, grid[i]);
  }
  return out;
}

double Damper::value(double eps, const Vec3& y, int dim) const {
  if (!enabled) return 1.0;
  return profile(eps * norm(y, dim));
}

}  // namespace hplab
