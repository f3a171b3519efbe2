#pragma once

#include <vector>

#include "hplab/field.hpp"

namespace hplab {

inline constexpr std::size_t kWorkspaceCapacity = 20000;

struct InteractionSpec {
  double g = 0.0;
  int N = 3;  ///< interaction is g/(N+1) phi^(N+1)
  bool vacuum_shift = false;

  void validate() const;
};

/// Uniform lattice over the box [-L/2, L/2)^d with P points per axis.
struct QuadratureGrid {
  int dim = 1;
  double length = 0.0;
  int points_per_axis = 0;
  double weight = 0.0;
  std::vector<Vec3> points;
};

/// Smallest P for which the trapezoid rule integrates phi^(N+1) exactly.
int min_quadrature_points(int n_max, int N);

/// points_per_axis = 0 picks min_quadrature_points.
QuadratureGrid make_quadrature_grid(const ModeSet& modes, int N, int points_per_axis = 0);

/// Products of field operators compressed to the truncated space: each factor
/// is built on a basis with `headroom` extra particles and the result is the
/// top-left block. Because the basis is graded, the truncated basis is a
/// prefix of the extended one.
class CompressedAlgebra {
 public:
  CompressedAlgebra(const FockBasis& basis, int headroom, std::size_t capacity = kWorkspaceCapacity);

  const FockBasis& extended() const noexcept { return ext_; }
  Eigen::Index dim() const noexcept { return dim_; }

  SparseOperator field(const OneParticleVector& alpha) const;
  /// P A B P
  FockOperator product(const SparseOperator& a, const SparseOperator& b) const;
  /// P A^p P
  FockOperator power(const SparseOperator& a, int p) const;

 private:
  FockBasis ext_;
  Eigen::Index dim_;
};

/// Headroom needed by the density of a phi^(N+1) theory.
int density_headroom(int N);

FockOperator h_density(const FieldConfig& cfg, const InteractionSpec& spec, const Vec3& y, double t);

/// sum_y w chi(eps y) h_density(y, tau); parallel over fixed chunks.
FockOperator assemble_h(const FieldConfig& cfg, const InteractionSpec& spec, const QuadratureGrid& grid);
/// Plain sequential reference for assemble_h.
FockOperator assemble_h_serial(const FieldConfig& cfg, const InteractionSpec& spec,
                               const QuadratureGrid& grid);

FockOperator free_h(const FieldConfig& cfg, const QuadratureGrid& grid, bool vacuum_shift = false);

/// g/(N+1) sum_y w chi(eps y) phi_I(y, t)^(N+1), phi_I carrying the free phases
/// exp(i omega_k (t - tau)), omega_k = k0 F(eps k)^2. With vacuum_shift the
/// vacuum expectation is removed so that H_I matches H - H0.
FockOperator interaction_h(const FieldConfig& cfg, const InteractionSpec& spec,
                           const QuadratureGrid& grid, double t);

/// One-particle energies of H0 with the damper off: k0 F(eps k)^2.
std::vector<double> free_mode_energies(const FieldConfig& cfg);
/// 1/2 sum_k k0 F(eps k)^2.
double free_vacuum_energy(const FieldConfig& cfg);
/// E_vac + sum_k n_k omega_k for every basis state, in basis order.
std::vector<double> free_tower(const FieldConfig& cfg);

}  // namespace hplab
