#include "hplab/fock.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hplab/errors.hpp"

namespace hplab {

namespace {

void enumerate_layer(int modes, int total, Occupation& current, int mode,
                     std::vector<Occupation>& out) {
  if (mode == modes - 1) {
    current[static_cast<std::size_t>(mode)] = total;
    out.push_back(current);
    return;
  }
  for (int n = 0; n <= total; ++n) {
    current[static_cast<std::size_t>(mode)] = n;
    enumerate_layer(modes, total - n, current, mode + 1, out);
  }
}

void require_size(const OneParticleVector& psi, const FockBasis& basis) {
  if (psi.size() != basis.modes().size()) {
    throw ShapeError("one-particle vector has " + std::to_string(psi.size()) +
                     " entries, basis has " + std::to_string(basis.modes().size()) + " modes");
  }
}

}  // namespace

double ModeSet::volume() const noexcept { return std::pow(length, dim); }

int ModeSet::partner(int mode) const {
  auto target = lattice[static_cast<std::size_t>(mode)];
  for (int i = 0; i < dim; ++i) target[static_cast<std::size_t>(i)] = -target[static_cast<std::size_t>(i)];
  for (int j = 0; j < size(); ++j) {
    if (lattice[static_cast<std::size_t>(j)] == target) return j;
  }
  throw ContractError("mode set is not closed under k -> -k");
}

ModeSet make_modeset(int dim, double length, int n_max, double mass) {
  if (dim < 1 || dim > 3) throw ParameterError("dimension must be 1, 2 or 3");
  if (!(length > 0.0)) throw ParameterError("box length must be positive");
  if (n_max < 0) throw ParameterError("n_max must be non-negative");
  if (!(mass > 0.0)) throw ParameterError("mass must be positive");
  ModeSet ms{dim, length, n_max, mass, {}, {}, {}};
  const int side = 2 * n_max + 1;
  int count = 1;
  for (int i = 0; i < dim; ++i) count *= side;
  for (int c = 0; c < count; ++c) {
    std::array<int, 3> n{0, 0, 0};
    int rest = c;
    for (int i = dim - 1; i >= 0; --i) {
      n[static_cast<std::size_t>(i)] = rest % side - n_max;
      rest /= side;
    }
    Vec3 k{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      k[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * n[static_cast<std::size_t>(i)] / length;
    }
    ms.lattice.push_back(n);
    ms.momenta.push_back(k);
    const double kk = norm(k, dim);
    ms.energies.push_back(std::sqrt(kk * kk + mass * mass));
  }
  return ms;
}

std::size_t FockBasis::count(int modes, int max_particles) {
  // C(n+M-1, n) built incrementally; saturate instead of overflowing.
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  std::size_t total = 0;
  double layer = 1.0;
  for (int n = 0; n <= max_particles; ++n) {
    if (n > 0) layer = layer * (n + modes - 1) / n;
    if (layer > static_cast<double>(cap) || total > cap) return cap;
    total += static_cast<std::size_t>(std::llround(layer));
  }
  return total;
}

FockBasis::FockBasis(ModeSet modes, int max_particles, std::size_t capacity)
    : modes_(std::move(modes)), max_particles_(max_particles) {
  if (max_particles < 0) throw ParameterError("N_max must be non-negative");
  const int m = modes_.size();
  const std::size_t expected = count(m, max_particles);
  if (expected > capacity) {
    throw CapacityError("basis of " + std::to_string(expected) + " states exceeds capacity " +
                        std::to_string(capacity));
  }
  states_.reserve(expected);
  Occupation current(static_cast<std::size_t>(m), 0);
  for (int n = 0; n <= max_particles; ++n) {
    std::fill(current.begin(), current.end(), 0);
    enumerate_layer(m, n, current, 0, states_);
  }
  totals_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    index_.emplace(states_[i], i);
    int t = 0;
    for (int v : states_[i]) t += v;
    totals_.push_back(t);
  }
  raise_.assign(states_.size() * static_cast<std::size_t>(m), -1);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (totals_[i] == max_particles) continue;
    Occupation up = states_[i];
    for (int k = 0; k < m; ++k) {
      ++up[static_cast<std::size_t>(k)];
      raise_[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(k)] =
          static_cast<long>(index_.at(up));
      --up[static_cast<std::size_t>(k)];
    }
  }
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FockBasis::layer_end(int n) const {
  if (n < 0) return 0;
  if (n >= max_particles_) return states_.size();
  return count(modes_.size(), n);
}

FockBasis enumerate_basis(const ModeSet& modes, int max_particles, std::size_t capacity) {
  return FockBasis(modes, max_particles, capacity);
}

FockOperator a_plus(const OneParticleVector& psi, const FockBasis& basis) {
  require_size(psi, basis);
  const std::size_t dim = basis.size();
  FockOperator a = FockOperator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (int k = 0; k < basis.modes().size(); ++k) {
      const long j = basis.raise(i, k);
      if (j < 0) continue;
      const double amp = std::sqrt(basis.state(i)[static_cast<std::size_t>(k)] + 1.0);
      a(j, static_cast<Eigen::Index>(i)) += psi[k] * amp;
    }
  }
  return a;
}

FockOperator a_minus(const OneParticleVector& psi, const FockBasis& basis) {
  require_size(psi, basis);
  const std::size_t dim = basis.size();
  FockOperator a = FockOperator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  // Lowering from j = raise(i, k) back to i carries sqrt(n_k(j)) = sqrt(n_k(i) + 1).
  for (std::size_t i = 0; i < dim; ++i) {
    for (int k = 0; k < basis.modes().size(); ++k) {
      const long j = basis.raise(i, k);
      if (j < 0) continue;
      const double amp = std::sqrt(basis.state(i)[static_cast<std::size_t>(k)] + 1.0);
      a(static_cast<Eigen::Index>(i), j) += std::conj(psi[k]) * amp;
    }
  }
  return a;
}

SparseOperator field_combination(const OneParticleVector& alpha, const FockBasis& basis) {
  require_size(alpha, basis);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(basis.size() * static_cast<std::size_t>(basis.modes().size()) * 2);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (int k = 0; k < basis.modes().size(); ++k) {
      const long j = basis.raise(i, k);
      if (j < 0 || alpha[k] == Complex{}) continue;
      const double amp = std::sqrt(basis.state(i)[static_cast<std::size_t>(k)] + 1.0);
      entries.emplace_back(j, static_cast<Eigen::Index>(i), alpha[k] * amp);
      entries.emplace_back(static_cast<Eigen::Index>(i), j, std::conj(alpha[k]) * amp);
    }
  }
  SparseOperator op(dim, dim);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

Complex fock_inner(const FockVector& u, const FockVector& v) {
  if (u.size() != v.size()) throw ShapeError("Fock vectors live in different bases");
  return u.dot(v);  // conjugate-linear in u
}

double fock_norm(const FockVector& u) { return std::sqrt(fock_inner(u, u).real()); }

FockVector vacuum(const FockBasis& basis) { return basis_vector(basis, 0); }

FockVector basis_vector(const FockBasis& basis, std::size_t i) {
  FockVector v = FockVector::Zero(static_cast<Eigen::Index>(basis.size()));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

FockOperator number_operator(const FockBasis& basis) {
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) diag[static_cast<Eigen::Index>(i)] = basis.total(i);
  return diag.asDiagonal();
}

std::vector<std::size_t> safe_subspace(const FockBasis& basis, int margin) {
  if (margin < 0 || margin > basis.max_particles()) {
    throw ParameterError("safe-subspace margin " + std::to_string(margin) +
                         " outside [0, N_max = " + std::to_string(basis.max_particles()) + "]");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.total(i) <= basis.max_particles() - margin) out.push_back(i);
  }
  return out;
}

double restricted_norm(const FockOperator& a, std::span<const std::size_t> cols) {
  double acc = 0.0;
  for (std::size_t c : cols) acc += a.col(static_cast<Eigen::Index>(c)).squaredNorm();
  return std::sqrt(acc);
}

double hermiticity_defect(const FockOperator& a) { return (a - a.adjoint()).norm(); }

}  // namespace hplab
