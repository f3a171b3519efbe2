#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hplab/moll.hpp"

namespace hplab {

using Complex = std::complex<double>;
using Samples = Eigen::VectorXcd;

/// Uniform sampling of [lo, hi] with n points, endpoints included.
struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int n = 0;

  double spacing() const noexcept { return (hi - lo) / (n - 1); }
  double at(int i) const noexcept { return lo + i * spacing(); }
  std::vector<double> points() const;
  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(double lo, double hi, int n);

/// Strictly decreasing positive eps values.
class EpsilonLadder {
 public:
  explicit EpsilonLadder(std::vector<double> values);
  /// eps_j = eps0 * 2^-j for j = 0..rungs-1.
  static EpsilonLadder geometric(double eps0, int rungs);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  std::vector<double> values_;
};

enum class DerivativeRule {
  // FFT derivative after subtracting a smooth erf step that carries the
  // end-to-end jump; exact to roundoff for resolved samples with flat tails.
  spectral,
  // Fourth-order central differences, one-sided fourth order at the ends.
  finite_difference4,
};

/// One nonlinear generalized function: an eps-indexed family of samples on a
/// fixed grid. Generators are pure; calling twice with the same eps yields
/// identical samples.
class Representative {
 public:
  using Generator = std::function<Samples(double)>;

  Representative(GridSpec grid, std::string tag, Generator gen,
                 DerivativeRule rule = DerivativeRule::spectral);

  /// Samples at eps; throws DomainError on non-finite values.
  Samples operator()(double eps) const;

  const GridSpec& grid() const noexcept { return grid_; }
  const std::string& tag() const noexcept { return tag_; }
  DerivativeRule rule() const noexcept { return rule_; }

 private:
  GridSpec grid_;
  std::string tag_;
  Generator gen_;
  DerivativeRule rule_;
};

/// Step function convolved with the mollifier kernel at scale eps, evaluated
/// spectrally on a periodic embedding twice the grid length.
Representative heaviside_rep(const Mollifier& m, const GridSpec& grid);
/// Exact derivative of heaviside_rep (the mollifier kernel itself).
Representative dirac_rep(const Mollifier& m, const GridSpec& grid);
Representative constant_rep(const GridSpec& grid, Complex value);

Representative gf_sum(const Representative& a, const Representative& b);
Representative gf_difference(const Representative& a, const Representative& b);
Representative gf_product(const Representative& a, const Representative& b);
Representative gf_scale(Complex c, const Representative& a);
Representative gf_power(const Representative& a, int p);
Representative gf_derivative(const Representative& a);

inline Representative operator+(const Representative& a, const Representative& b) { return gf_sum(a, b); }
inline Representative operator-(const Representative& a, const Representative& b) { return gf_difference(a, b); }
inline Representative operator*(const Representative& a, const Representative& b) { return gf_product(a, b); }
inline Representative operator*(Complex c, const Representative& a) { return gf_scale(c, a); }

Samples derivative(const GridSpec& grid, const Samples& f, DerivativeRule rule);

/// Trapezoid quadrature of f * psi over the grid.
Complex trapezoid(const GridSpec& grid, const Samples& f, const Samples& psi);

/// Pairing of a representative at eps with test-function samples. The test
/// function must vanish (relative 1e-8) at both grid ends.
Complex pair(const Representative& a, const Samples& psi, double eps);

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
};

Samples sample(const GridSpec& grid, const TestFunction& psi);

/// exp(-1/(1-s^2)) bump on |x - center| < radius, times (1 + tilt*(x - center)).
TestFunction bump_test(std::string name, double center, double radius, double tilt = 0.0);
/// 1 on |x| <= inner, smooth plateau decay to 0 at |x| = outer.
TestFunction window_test(std::string name, double inner, double outer);

enum class Verdict { associated, not_associated, inconclusive };
const char* to_string(Verdict v) noexcept;

struct AssociationThresholds {
  double min_slope = 0.5;
  double relative_limit = 1e-4;
};

struct AssociationReport {
  std::vector<double> eps;
  std::vector<std::string> tests;
  /// pairings[t][j]: test t at rung j.
  std::vector<std::vector<Complex>> pairings;
  /// Per-test log-log slope of |pairing| against eps.
  std::vector<double> slopes;
  /// Per-test eps -> 0 extrapolation from a least-squares line in eps.
  std::vector<Complex> limits;
  std::vector<double> thresholds;
  std::vector<Verdict> test_verdicts;
  double slope = 0.0;  ///< minimum over tests
  Complex limit{};     ///< largest-magnitude limit over tests
  Verdict verdict = Verdict::inconclusive;
};

AssociationReport associate(const Representative& a, const Representative& b,
                            const EpsilonLadder& ladder,
                            const std::vector<TestFunction>& tests,
                            AssociationThresholds thresholds = {});

}  // namespace hplab
