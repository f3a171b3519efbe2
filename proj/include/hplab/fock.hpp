#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hplab/moll.hpp"

namespace hplab {

using Complex = std::complex<double>;
using FockOperator = Eigen::MatrixXcd;
using FockVector = Eigen::VectorXcd;
using OneParticleVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

/// Periodic-box momentum modes k = 2 pi n / L, |n_i| <= n_max, with
/// energies k0 = sqrt(|k|^2 + m^2). Mode order is lexicographic in n.
struct ModeSet {
  int dim = 1;
  double length = 0.0;
  int n_max = 0;
  double mass = 1.0;
  std::vector<std::array<int, 3>> lattice;
  std::vector<Vec3> momenta;
  std::vector<double> energies;

  int size() const noexcept { return static_cast<int>(momenta.size()); }
  double volume() const noexcept;
  /// Index of the mode carrying -k.
  int partner(int mode) const;
  double k_abs(int mode) const { return norm(momenta[static_cast<std::size_t>(mode)], dim); }
};

ModeSet make_modeset(int dim, double length, int n_max, double mass);

using Occupation = std::vector<int>;

inline constexpr std::size_t kDefaultCapacity = 3000;

/// Occupation-number basis with total particle number <= N_max, graded by
/// total number and lexicographic within each layer. The vacuum is state 0.
class FockBasis {
 public:
  FockBasis(ModeSet modes, int max_particles, std::size_t capacity = kDefaultCapacity);

  /// Stars-and-bars count sum_{n<=N} C(n+M-1, n); saturates on overflow.
  static std::size_t count(int modes, int max_particles);

  std::size_t size() const noexcept { return states_.size(); }
  const ModeSet& modes() const noexcept { return modes_; }
  int max_particles() const noexcept { return max_particles_; }

  const Occupation& state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> index_of(const Occupation& occ) const;
  int total(std::size_t i) const { return totals_[i]; }
  /// Number of states with total <= n.
  std::size_t layer_end(int n) const;

  /// Target of a+_mode acting on state i, or -1 when the cutoff drops it.
  long raise(std::size_t i, int mode) const {
    return raise_[i * static_cast<std::size_t>(modes_.size()) + static_cast<std::size_t>(mode)];
  }

  bool operator==(const FockBasis& o) const { return states_ == o.states_ && modes_.size() == o.modes_.size(); }

 private:
  ModeSet modes_;
  int max_particles_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::map<Occupation, std::size_t> index_;
  std::vector<long> raise_;
};

FockBasis enumerate_basis(const ModeSet& modes, int max_particles,
                          std::size_t capacity = kDefaultCapacity);

/// sum_k psi_k a+_k with amplitude sqrt(n_k + 1); transitions above N_max dropped.
FockOperator a_plus(const OneParticleVector& psi, const FockBasis& basis);
/// sum_k conj(psi_k) a_k with amplitude sqrt(n_k).
FockOperator a_minus(const OneParticleVector& psi, const FockBasis& basis);

/// sum_k alpha_k a+_k + conj(alpha_k) a_k as a sparse matrix (at most 2M
/// entries per column). Hermitian by construction.
SparseOperator field_combination(const OneParticleVector& alpha, const FockBasis& basis);

Complex fock_inner(const FockVector& u, const FockVector& v);
double fock_norm(const FockVector& u);

FockVector vacuum(const FockBasis& basis);
FockVector basis_vector(const FockBasis& basis, std::size_t i);
FockOperator number_operator(const FockBasis& basis);

/// Ordinals of states with total occupation <= N_max - margin.
std::vector<std::size_t> safe_subspace(const FockBasis& basis, int margin);

/// Frobenius norm of the columns of `a` listed in `cols`.
double restricted_norm(const FockOperator& a, std::span<const std::size_t> cols);

double hermiticity_defect(const FockOperator& a);

}  // namespace hplab
