#pragma once

#include <memory>
#include <numbers>
#include <random>

#include "hplab/dynamics.hpp"

namespace hplab::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::shared_ptr<const FockBasis> basis(int n_max, int N_max, double length = kTwoPi, double mass = 1.0) {
  return std::make_shared<const FockBasis>(make_modeset(1, length, n_max, mass), N_max);
}

inline Mollifier mollifier(double r_inner = 1.0, double r_outer = 2.0) {
  return Mollifier(make_plateau_profile(r_inner, r_outer), 1);
}

/// Default model: 5 modes, 126 states, plateau at eps = 0.1.
inline FieldConfig default_field(double eps = 0.1) {
  return make_field_config(basis(2, 4), mollifier(), Damper{}, eps, 0.0);
}

inline OneParticleVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  OneParticleVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(d(rng), d(rng));
  return v;
}

inline FockOperator identity_like(const FockOperator& a) { return FockOperator::Identity(a.rows(), a.cols()); }

}  // namespace hplab::testing
