#include "hplab/genfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_grid(const Representative& a, const Representative& b) {
  if (!(a.grid() == b.grid())) throw ShapeError("representatives live on different grids");
}

// Evaluates (1/box) * sum_j coeff(k_j) exp(i k_j x_i) at the grid points, with
// k_j = 2 pi j / box over a power-of-two embedding at least twice the grid.
template <class Coeff>
Samples periodic_series(const GridSpec& grid, Coeff&& coeff, double k_cut) {
  const double h = grid.spacing();
  std::size_t nfft = 1;
  while (nfft < 2 * static_cast<std::size_t>(grid.n)) nfft <<= 1;
  const double box = static_cast<double>(nfft) * h;
  if (k_cut >= kPi / h) {
    throw ResolutionError("grid spacing " + std::to_string(h) +
                          " does not resolve wavenumber " + std::to_string(k_cut));
  }
  std::vector<Complex> spectrum(nfft);
  const long half = static_cast<long>(nfft / 2);
  for (long j = -half; j < half; ++j) {
    const double k = 2.0 * kPi * static_cast<double>(j) / box;
    const Complex c = coeff(j, k);
    if (c == Complex{}) continue;
    const std::size_t slot = static_cast<std::size_t>((j + static_cast<long>(nfft)) % static_cast<long>(nfft));
    spectrum[slot] = c * std::polar(1.0, k * grid.lo) * (static_cast<double>(nfft) / box);
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> values;
  fft.inv(values, spectrum);
  Samples out(grid.n);
  for (int i = 0; i < grid.n; ++i) out[i] = values[static_cast<std::size_t>(i)];
  return out;
}

void require_interior_support(const GridSpec& g, const Samples& psi) {
  if (psi.size() != g.n) throw ShapeError("test function sample count does not match grid");
  const double peak = psi.cwiseAbs().maxCoeff();
  const double edge = std::max(std::abs(psi[0]), std::abs(psi[g.n - 1]));
  if (peak > 0.0 && edge > 1e-8 * peak) {
    throw DomainError("test function support touches the grid boundary");
  }
}

void require_jump_inside(const GridSpec& grid) {
  if (!(grid.lo < 0.0 && 0.0 < grid.hi)) {
    throw DomainError("grid [" + std::to_string(grid.lo) + ", " + std::to_string(grid.hi) +
                      "] does not contain 0 strictly inside");
  }
}

Samples spectral_derivative(const GridSpec& grid, const Samples& f) {
  const int n = grid.n;
  const double mid = 0.5 * (grid.lo + grid.hi);
  const double width = (grid.hi - grid.lo) / 14.0;
  const Complex jump = f[n - 1] - f[0];
  Samples rest(n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * std::erfc(-(grid.at(i) - mid) / width);
    rest[i] = f[i] - f[0] - jump * s;
  }
  const double period = n * grid.spacing();
  std::vector<Complex> in(rest.data(), rest.data() + n);
  std::vector<Complex> spec;
  Eigen::FFT<double> fft;
  fft.fwd(spec, in);
  for (int j = 0; j < n; ++j) {
    const int jj = j <= n / 2 ? j : j - n;
    if (n % 2 == 0 && j == n / 2) {
      spec[static_cast<std::size_t>(j)] = 0.0;
      continue;
    }
    spec[static_cast<std::size_t>(j)] *= Complex(0.0, 2.0 * kPi * jj / period);
  }
  std::vector<Complex> back;
  fft.inv(back, spec);
  Samples out(n);
  for (int i = 0; i < n; ++i) {
    const double z = (grid.at(i) - mid) / width;
    out[i] = back[static_cast<std::size_t>(i)] + jump * std::exp(-z * z) / (width * std::sqrt(kPi));
  }
  return out;
}

Samples fd4_derivative(const GridSpec& grid, const Samples& f) {
  const int n = grid.n;
  const double h = grid.spacing();
  Samples out(n);
  for (int i = 2; i < n - 2; ++i) {
    out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  }
  out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
  out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
  out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) /
               (12.0 * h);
  out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) /
               (12.0 * h);
  return out;
}

// Least-squares slope and intercept of y against x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = at(i);
  return out;
}

GridSpec make_grid(double lo, double hi, int n) {
  if (!(lo < hi)) throw ParameterError("grid requires lo < hi");
  if (n < 16) throw ParameterError("grid requires at least 16 samples");
  return GridSpec{lo, hi, n};
}

EpsilonLadder::EpsilonLadder(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] > 0.0)) throw LadderError("ladder values must be positive");
    if (j > 0 && !(values_[j] < values_[j - 1])) {
      throw LadderError("ladder values must be strictly decreasing");
    }
  }
}

EpsilonLadder EpsilonLadder::geometric(double eps0, int rungs) {
  if (rungs < 1) throw LadderError("ladder needs at least one rung");
  std::vector<double> v(static_cast<std::size_t>(rungs));
  for (int j = 0; j < rungs; ++j) v[static_cast<std::size_t>(j)] = std::ldexp(eps0, -j);
  return EpsilonLadder(std::move(v));
}

Representative::Representative(GridSpec grid, std::string tag, Generator gen, DerivativeRule rule)
    : grid_(grid), tag_(std::move(tag)), gen_(std::move(gen)), rule_(rule) {}

Samples Representative::operator()(double eps) const {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  Samples s = gen_(eps);
  if (s.size() != grid_.n) throw ShapeError("generator returned wrong sample count");
  if (!s.allFinite()) throw DomainError("non-finite samples in " + tag_);
  return s;
}

Representative heaviside_rep(const Mollifier& m, const GridSpec& grid) {
  require_jump_inside(grid);
  auto gen = [m, grid](double eps) {
    const double k_cut = m.profile.r_outer() / eps;
    // x/box + sum_{k != 0} F(eps k) e^{ikx} / (i k box) integrates the periodized
    // kernel from 0; the k = 0 slot carries the linear part separately.
    Samples s = periodic_series(
        grid,
        [&](long j, double k) -> Complex {
          if (j == 0) return 0.0;
          const double w = m.profile(eps * std::abs(k));
          return w == 0.0 ? Complex{} : Complex(w, 0.0) / Complex(0.0, k);
        },
        k_cut);
    std::size_t nfft = 1;
    while (nfft < 2 * static_cast<std::size_t>(grid.n)) nfft <<= 1;
    const double box = static_cast<double>(nfft) * grid.spacing();
    for (int i = 0; i < grid.n; ++i) s[i] = Complex(0.5 + grid.at(i) / box + s[i].real(), 0.0);
    return s;
  };
  return Representative(grid, "H", gen);
}

Representative dirac_rep(const Mollifier& m, const GridSpec& grid) {
  require_jump_inside(grid);
  auto gen = [m, grid](double eps) {
    Samples s = periodic_series(
        grid, [&](long, double k) -> Complex { return m.profile(eps * std::abs(k)); },
        m.profile.r_outer() / eps);
    for (auto& v : s) v = Complex(v.real(), 0.0);
    return s;
  };
  return Representative(grid, "delta", gen);
}

Representative constant_rep(const GridSpec& grid, Complex value) {
  return Representative(grid, "const", [grid, value](double) {
    return Samples::Constant(grid.n, value).eval();
  });
}

Representative gf_sum(const Representative& a, const Representative& b) {
  require_same_grid(a, b);
  return Representative(a.grid(), "(" + a.tag() + "+" + b.tag() + ")",
                        [a, b](double eps) { return (a(eps) + b(eps)).eval(); }, a.rule());
}

Representative gf_difference(const Representative& a, const Representative& b) {
  require_same_grid(a, b);
  return Representative(a.grid(), "(" + a.tag() + "-" + b.tag() + ")",
                        [a, b](double eps) { return (a(eps) - b(eps)).eval(); }, a.rule());
}

Representative gf_product(const Representative& a, const Representative& b) {
  require_same_grid(a, b);
  return Representative(a.grid(), a.tag() + "*" + b.tag(),
                        [a, b](double eps) { return a(eps).cwiseProduct(b(eps)).eval(); },
                        a.rule());
}

Representative gf_scale(Complex c, const Representative& a) {
  return Representative(a.grid(), "c*" + a.tag(),
                        [a, c](double eps) { return (c * a(eps)).eval(); }, a.rule());
}

Representative gf_power(const Representative& a, int p) {
  if (p < 1) throw ParameterError("gf_power requires p >= 1");
  return Representative(a.grid(), a.tag() + "^" + std::to_string(p),
                        [a, p](double eps) {
                          const Samples base = a(eps);
                          Samples out = base;
                          for (int i = 1; i < p; ++i) out = out.cwiseProduct(base);
                          return out;
                        },
                        a.rule());
}

Representative gf_derivative(const Representative& a) {
  return Representative(a.grid(), "D(" + a.tag() + ")",
                        [a](double eps) { return derivative(a.grid(), a(eps), a.rule()); },
                        a.rule());
}

Samples derivative(const GridSpec& grid, const Samples& f, DerivativeRule rule) {
  if (f.size() != grid.n) throw ShapeError("sample count does not match grid");
  return rule == DerivativeRule::spectral ? spectral_derivative(grid, f) : fd4_derivative(grid, f);
}

Complex trapezoid(const GridSpec& grid, const Samples& f, const Samples& psi) {
  if (f.size() != grid.n || psi.size() != grid.n) throw ShapeError("sample count does not match grid");
  Complex acc{};
  for (int i = 1; i < grid.n - 1; ++i) acc += f[i] * psi[i];
  acc += 0.5 * (f[0] * psi[0] + f[grid.n - 1] * psi[grid.n - 1]);
  return acc * grid.spacing();
}

Complex pair(const Representative& a, const Samples& psi, double eps) {
  require_interior_support(a.grid(), psi);
  return trapezoid(a.grid(), a(eps), psi);
}

Samples sample(const GridSpec& grid, const TestFunction& psi) {
  Samples s(grid.n);
  for (int i = 0; i < grid.n; ++i) s[i] = psi.f(grid.at(i));
  return s;
}

TestFunction bump_test(std::string name, double center, double radius, double tilt) {
  return {std::move(name), [=](double x) {
            const double s = (x - center) / radius;
            if (std::abs(s) >= 1.0) return 0.0;
            return std::exp(-1.0 / (1.0 - s * s)) * (1.0 + tilt * (x - center));
          }};
}

TestFunction window_test(std::string name, double inner, double outer) {
  const SpectralProfile profile(inner, outer);
  return {std::move(name), [profile](double x) { return profile(std::abs(x)); }};
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::associated:
      return "associated";
    case Verdict::not_associated:
      return "not-associated";
    default:
      return "inconclusive";
  }
}

AssociationReport associate(const Representative& a, const Representative& b,
                            const EpsilonLadder& ladder, const std::vector<TestFunction>& tests,
                            AssociationThresholds thresholds) {
  require_same_grid(a, b);
  if (ladder.size() < 3) throw LadderError("association needs at least 3 ladder rungs");
  if (tests.empty()) throw ParameterError("association needs at least one test function");

  const GridSpec& g = a.grid();
  const std::size_t rungs = ladder.size();
  std::vector<Samples> psis;
  for (const auto& t : tests) {
    psis.push_back(sample(g, t));
    require_interior_support(g, psis.back());
  }
  const auto diff = gf_difference(a, b);

  AssociationReport rep;
  rep.eps = ladder.values();
  rep.pairings.assign(tests.size(), std::vector<Complex>(rungs));
  std::vector<double> scale(tests.size(), 0.0);

  // One rung per task; each task writes only its own column.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < rungs; ++j) {
    const Samples d = diff(ladder[j]);
    for (std::size_t t = 0; t < tests.size(); ++t) rep.pairings[t][j] = trapezoid(g, d, psis[t]);
  }
  {
    const Samples a0 = a(ladder[0]);
    const Samples b0 = b(ladder[0]);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      scale[t] = std::abs(trapezoid(g, a0, psis[t])) + std::abs(trapezoid(g, b0, psis[t]));
    }
  }

  rep.slope = std::numeric_limits<double>::infinity();
  bool all_assoc = true;
  bool any_not = false;
  std::vector<double> logeps;
  for (double e : rep.eps) logeps.push_back(std::log(e));
  for (std::size_t t = 0; t < tests.size(); ++t) {
    rep.tests.push_back(tests[t].name);
    const auto& p = rep.pairings[t];
    const double thr = thresholds.relative_limit * std::max(scale[t], 1e-300);
    rep.thresholds.push_back(thr);

    std::vector<double> re(rungs), im(rungs), logabs(rungs);
    bool all_tiny = true;
    for (std::size_t j = 0; j < rungs; ++j) {
      re[j] = p[j].real();
      im[j] = p[j].imag();
      logabs[j] = std::log(std::max(std::abs(p[j]), 1e-300));
      if (std::abs(p[j]) > 1e-14 * std::max(scale[t], 1.0)) all_tiny = false;
    }
    const double slope = all_tiny ? std::numeric_limits<double>::infinity()
                                  : line_fit(logeps, logabs).first;
    const Complex limit(line_fit(rep.eps, re).second, line_fit(rep.eps, im).second);
    bool decreasing = true;
    for (std::size_t j = 1; j < rungs; ++j) {
      if (std::abs(p[j]) > std::abs(p[j - 1]) * (1.0 + 1e-9) + 1e-14) decreasing = false;
    }

    Verdict v = Verdict::inconclusive;
    const bool small_limit = std::abs(limit) <= thr;
    if (all_tiny || (small_limit && decreasing && slope >= thresholds.min_slope)) {
      v = Verdict::associated;
    } else if (!small_limit && slope < thresholds.min_slope) {
      v = Verdict::not_associated;
    }
    rep.slopes.push_back(slope);
    rep.limits.push_back(limit);
    rep.test_verdicts.push_back(v);
    rep.slope = std::min(rep.slope, slope);
    if (std::abs(limit) >= std::abs(rep.limit)) rep.limit = limit;
    all_assoc = all_assoc && v == Verdict::associated;
    any_not = any_not || v == Verdict::not_associated;
  }
  rep.verdict = all_assoc ? Verdict::associated
                          : (any_not ? Verdict::not_associated : Verdict::inconclusive);
  return rep;
}

}  // namespace hplab
