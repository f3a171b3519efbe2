#include "hplab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

constexpr int kChunks = 16;

std::size_t extended_count(const FockBasis& basis, int headroom) {
  return FockBasis::count(basis.modes().size(), basis.max_particles() + headroom);
}

FockBasis make_extended(const FockBasis& basis, int headroom, std::size_t capacity) {
  if (headroom < 1) throw ParameterError("compression headroom must be >= 1");
  const std::size_t need = extended_count(basis, headroom);
  if (need > capacity) {
    throw CapacityError("operator workspace of " + std::to_string(need) +
                        " states exceeds bound " + std::to_string(capacity));
  }
  return FockBasis(basis.modes(), basis.max_particles() + headroom, capacity);
}

// Density without the damper factor, on a shared workspace.
FockOperator density(const CompressedAlgebra& alg, const FieldConfig& cfg,
                     const InteractionSpec& spec, const Vec3& y, double t, bool with_free) {
  const Eigen::Index dim = alg.dim();
  FockOperator out = FockOperator::Zero(dim, dim);
  const SparseOperator phi = alg.field(field_amplitudes(cfg, y, t));
  if (with_free) {
    const SparseOperator pi = alg.field(momentum_amplitudes(cfg, y, t));
    const double m2 = cfg.modes().mass * cfg.modes().mass;
    out += 0.5 * alg.product(pi, pi);
    for (int mu = 0; mu < cfg.modes().dim; ++mu) {
      const SparseOperator d = alg.field(gradient_amplitudes(cfg, y, t, mu));
      out += 0.5 * alg.product(d, d);
    }
    out += 0.5 * m2 * alg.product(phi, phi);
  }
  if (spec.g != 0.0) out += (spec.g / (spec.N + 1)) * alg.power(phi, spec.N + 1);
  return out;
}

void subtract_vacuum(FockOperator& h) {
  const Complex e = h(0, 0);
  h.diagonal().array() -= e;
}

FockOperator assemble(const FieldConfig& cfg, const InteractionSpec& spec,
                      const QuadratureGrid& grid, double t, bool with_free, bool parallel) {
  spec.validate();
  if (grid.dim != cfg.modes().dim || grid.length != cfg.modes().length) {
    throw ShapeError("quadrature grid does not match the box");
  }
  if (grid.points_per_axis < min_quadrature_points(cfg.modes().n_max, spec.N)) {
    throw ParameterError("quadrature grid has " + std::to_string(grid.points_per_axis) +
                         " points per axis; invariant P >= 2(N+1)n_max+1 requires " +
                         std::to_string(min_quadrature_points(cfg.modes().n_max, spec.N)));
  }
  const CompressedAlgebra alg(*cfg.basis, density_headroom(spec.N));
  const Eigen::Index dim = alg.dim();
  const auto n = static_cast<long>(grid.points.size());

  auto accumulate = [&](long j, FockOperator& acc) {
    const Vec3& y = grid.points[static_cast<std::size_t>(j)];
    const double w = grid.weight * cfg.damper.value(cfg.eps, y, grid.dim);
    if (w != 0.0) acc += w * density(alg, cfg, spec, y, t, with_free);
  };

  FockOperator h = FockOperator::Zero(dim, dim);
  if (parallel) {
    std::vector<FockOperator> partial(kChunks, FockOperator::Zero(dim, dim));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < kChunks; ++c) {
      const long lo = n * c / kChunks;
      const long hi = n * (c + 1) / kChunks;
      for (long j = lo; j < hi; ++j) accumulate(j, partial[static_cast<std::size_t>(c)]);
    }
    for (const auto& p : partial) h += p;
  } else {
    for (long j = 0; j < n; ++j) accumulate(j, h);
  }
  // Symmetrize away roundoff so downstream eigensolvers see an exactly Hermitian matrix.
  h = 0.5 * (h + h.adjoint()).eval();
  return h;
}

}  // namespace

void InteractionSpec::validate() const {
  if (N < 2) throw ParameterError("interaction power N must be >= 2, got " + std::to_string(N));
  if (!std::isfinite(g)) throw ParameterError("coupling g must be finite");
}

int min_quadrature_points(int n_max, int N) { return 2 * (N + 1) * n_max + 1; }

QuadratureGrid make_quadrature_grid(const ModeSet& modes, int N, int points_per_axis) {
  const int need = min_quadrature_points(modes.n_max, N);
  const int p = points_per_axis == 0 ? need : points_per_axis;
  if (p < need) {
    throw ParameterError("quadrature points per axis " + std::to_string(p) +
                         " below invariant P >= 2(N+1)n_max+1 = " + std::to_string(need));
  }
  QuadratureGrid grid{modes.dim, modes.length, p, std::pow(modes.length / p, modes.dim), {}};
  long total = 1;
  for (int i = 0; i < modes.dim; ++i) total *= p;
  grid.points.reserve(static_cast<std::size_t>(total));
  for (long c = 0; c < total; ++c) {
    Vec3 y{0.0, 0.0, 0.0};
    long rest = c;
    for (int i = modes.dim - 1; i >= 0; --i) {
      y[static_cast<std::size_t>(i)] = -0.5 * modes.length + static_cast<double>(rest % p) * modes.length / p;
      rest /= p;
    }
    grid.points.push_back(y);
  }
  return grid;
}

CompressedAlgebra::CompressedAlgebra(const FockBasis& basis, int headroom, std::size_t capacity)
    : ext_(make_extended(basis, headroom, capacity)),
      dim_(static_cast<Eigen::Index>(basis.size())) {}

SparseOperator CompressedAlgebra::field(const OneParticleVector& alpha) const {
  return field_combination(alpha, ext_);
}

FockOperator CompressedAlgebra::product(const SparseOperator& a, const SparseOperator& b) const {
  const SparseOperator top = a.topRows(dim_);
  const SparseOperator left = b.leftCols(dim_);
  return FockOperator(top * left);
}

FockOperator CompressedAlgebra::power(const SparseOperator& a, int p) const {
  if (p < 0) throw ParameterError("negative operator power");
  if (p == 0) return FockOperator::Identity(dim_, dim_);
  if (p == 1) return FockOperator(a.topLeftCorner(dim_, dim_));
  FockOperator w = FockOperator(a.leftCols(dim_));
  for (int i = 2; i < p; ++i) w = a * w;
  const SparseOperator top = a.topRows(dim_);
  return top * w;
}

int density_headroom(int N) { return std::max(1, (N + 1) / 2); }

FockOperator h_density(const FieldConfig& cfg, const InteractionSpec& spec, const Vec3& y, double t) {
  spec.validate();
  const CompressedAlgebra alg(*cfg.basis, density_headroom(spec.N));
  return density(alg, cfg, spec, y, t, true);
}

FockOperator assemble_h(const FieldConfig& cfg, const InteractionSpec& spec, const QuadratureGrid& grid) {
  FockOperator h = assemble(cfg, spec, grid, cfg.tau, true, true);
  if (spec.vacuum_shift) subtract_vacuum(h);
  return h;
}

FockOperator assemble_h_serial(const FieldConfig& cfg, const InteractionSpec& spec,
                               const QuadratureGrid& grid) {
  FockOperator h = assemble(cfg, spec, grid, cfg.tau, true, false);
  if (spec.vacuum_shift) subtract_vacuum(h);
  return h;
}

FockOperator free_h(const FieldConfig& cfg, const QuadratureGrid& grid, bool vacuum_shift) {
  InteractionSpec spec;
  spec.g = 0.0;
  spec.N = 2;
  spec.vacuum_shift = vacuum_shift;
  // The quadratic part only needs the N = 2 grid bound, which any admissible grid meets.
  FockOperator h = assemble(cfg, spec, grid, cfg.tau, true, true);
  if (vacuum_shift) subtract_vacuum(h);
  return h;
}

FockOperator interaction_h(const FieldConfig& cfg, const InteractionSpec& spec,
                           const QuadratureGrid& grid, double t) {
  const std::vector<double> omega = free_mode_energies(cfg);
  const double s = t - cfg.tau;
  spec.validate();
  if (grid.points_per_axis < min_quadrature_points(cfg.modes().n_max, spec.N)) {
    throw ParameterError("quadrature grid below invariant P >= 2(N+1)n_max+1");
  }
  const CompressedAlgebra alg(*cfg.basis, density_headroom(spec.N));
  const Eigen::Index dim = alg.dim();
  const auto n = static_cast<long>(grid.points.size());
  std::vector<FockOperator> partial(kChunks, FockOperator::Zero(dim, dim));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < kChunks; ++c) {
    const long lo = n * c / kChunks;
    const long hi = n * (c + 1) / kChunks;
    for (long j = lo; j < hi; ++j) {
      const Vec3& y = grid.points[static_cast<std::size_t>(j)];
      const double w = grid.weight * cfg.damper.value(cfg.eps, y, grid.dim);
      if (w == 0.0) continue;
      OneParticleVector alpha = field_amplitudes(cfg, y, cfg.tau);
      for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        alpha[k] *= std::polar(1.0, omega[static_cast<std::size_t>(k)] * s);
      }
      partial[static_cast<std::size_t>(c)] += w * alg.power(alg.field(alpha), spec.N + 1);
    }
  }
  FockOperator h = FockOperator::Zero(dim, dim);
  for (const auto& p : partial) h += p;
  h *= spec.g / (spec.N + 1);
  h = 0.5 * (h + h.adjoint()).eval();
  if (spec.vacuum_shift) subtract_vacuum(h);
  return h;
}

std::vector<double> free_mode_energies(const FieldConfig& cfg) {
  const std::vector<double> w = cfg.weights();
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = cfg.modes().energies[k] * w[k] * w[k];
  return out;
}

double free_vacuum_energy(const FieldConfig& cfg) {
  double e = 0.0;
  for (double w : free_mode_energies(cfg)) e += 0.5 * w;
  return e;
}

std::vector<double> free_tower(const FieldConfig& cfg) {
  const std::vector<double> omega = free_mode_energies(cfg);
  const double e0 = free_vacuum_energy(cfg);
  const FockBasis& b = *cfg.basis;
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    double e = e0;
    for (std::size_t k = 0; k < omega.size(); ++k) e += b.state(i)[k] * omega[k];
    out[i] = e;
  }
  return out;
}

}  // namespace hplab
