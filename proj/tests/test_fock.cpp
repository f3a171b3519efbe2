#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "hplab/errors.hpp"
#include "hplab/fock.hpp"
#include "support.hpp"

using namespace hplab;
using hplab::testing::random_vector;

namespace {

// Symmetric n-particle tensor for an occupation pattern, as a map from index
// tuples to amplitudes: the normalized symmetrization of e_0^{n_0} (x) e_1^{n_1} ...
using Tensor = std::map<std::vector<int>, Complex>;

Tensor symmetric_tensor(const Occupation& occ) {
  std::vector<int> seq;
  for (std::size_t k = 0; k < occ.size(); ++k) seq.insert(seq.end(), static_cast<std::size_t>(occ[k]), static_cast<int>(k));
  Tensor t;
  std::vector<int> perm = seq;
  std::sort(perm.begin(), perm.end());
  std::size_t distinct = 0;
  do {
    t[perm] = 1.0;
    ++distinct;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& [k, v] : t) v /= std::sqrt(static_cast<double>(distinct));
  return t;
}

// (a(psi) f)_n(xi_1..xi_n) = sqrt(n+1) sum_xi conj(psi(xi)) f_{n+1}(xi_1..xi_n, xi)
Tensor contract(const Tensor& f, const OneParticleVector& psi) {
  Tensor out;
  for (const auto& [idx, v] : f) {
    const double n1 = static_cast<double>(idx.size());
    std::vector<int> head(idx.begin(), idx.end() - 1);
    out[head] += std::sqrt(n1) * std::conj(psi[idx.back()]) * v;
  }
  return out;
}

Complex tensor_inner(const Tensor& a, const Tensor& b) {
  Complex acc{};
  for (const auto& [idx, v] : a) {
    auto it = b.find(idx);
    if (it != b.end()) acc += std::conj(v) * it->second;
  }
  return acc;
}

}  // namespace

TEST_CASE("mode set") {
  const ModeSet ms = make_modeset(1, hplab::testing::kTwoPi, 2, 1.0);
  CHECK(ms.size() == 5);
  for (int k = 0; k < ms.size(); ++k) {
    CHECK(ms.energies[static_cast<std::size_t>(k)] >= ms.mass);
    CHECK(ms.momenta[static_cast<std::size_t>(ms.partner(k))][0] == -ms.momenta[static_cast<std::size_t>(k)][0]);
  }
  CHECK(make_modeset(2, 1.0, 1, 1.0).size() == 9);
  CHECK(make_modeset(3, 1.0, 1, 1.0).size() == 27);
  CHECK_THROWS_AS(make_modeset(4, 1.0, 1, 1.0), ParameterError);
  CHECK_THROWS_AS(make_modeset(1, 1.0, 1, 0.0), ParameterError);
}

TEST_CASE("basis sizes") {
  CHECK(FockBasis(make_modeset(1, 1.0, 0, 1.0), 2).size() == 3);
  CHECK(FockBasis(make_modeset(1, 1.0, 0, 1.0), 0).size() == 1);
  CHECK(FockBasis(make_modeset(1, 1.0, 2, 1.0), 0).size() == 1);
  CHECK(FockBasis(make_modeset(1, 1.0, 2, 1.0), 4).size() == 126);
  // Two modes: 1 + 2 + 3.
  ModeSet two = make_modeset(1, 1.0, 1, 1.0);
  two.lattice.pop_back();
  two.momenta.pop_back();
  two.energies.pop_back();
  CHECK(FockBasis(two, 2).size() == 6);
  CHECK(FockBasis::count(5, 4) == 126);
  CHECK(FockBasis::count(2, 2) == 6);
}

TEST_CASE("basis ordering") {
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  CHECK(b.total(0) == 0);
  for (std::size_t i = 1; i < b.size(); ++i) {
    CHECK(b.total(i) >= b.total(i - 1));
    if (b.total(i) == b.total(i - 1)) CHECK(b.state(i - 1) < b.state(i));
    CHECK(b.index_of(b.state(i)) == i);
  }
  const FockBasis again(make_modeset(1, 1.0, 1, 1.0), 3);
  CHECK(b == again);
}

TEST_CASE("capacity bound") {
  CHECK_THROWS_AS(FockBasis(make_modeset(1, 1.0, 3, 1.0), 8, 100), CapacityError);
  CHECK_THROWS_AS(FockBasis(make_modeset(1, 1.0, 1, 1.0), -1), ParameterError);
}

TEST_CASE("creation operator") {
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  OneParticleVector e1 = OneParticleVector::Zero(3);
  e1[1] = 1.0;
  const FockVector one = a_plus(e1, b) * vacuum(b);
  const auto idx1 = b.index_of({0, 1, 0});
  REQUIRE(idx1);
  CHECK(one[static_cast<Eigen::Index>(*idx1)] == Complex(1.0));
  CHECK(std::abs(one.norm() - 1.0) < 1e-15);
  const FockVector two = a_plus(e1, b) * one;
  const auto idx2 = b.index_of({0, 2, 0});
  REQUIRE(idx2);
  CHECK(std::abs(two[static_cast<Eigen::Index>(*idx2)] - std::sqrt(2.0)) < 1e-15);
  const auto top = b.index_of({1, 1, 1});
  REQUIRE(top);
  CHECK((a_plus(e1, b) * basis_vector(b, *top)).norm() == 0.0);
  CHECK_THROWS_AS(a_plus(OneParticleVector::Zero(2), b), ShapeError);
}

TEST_CASE("annihilation operator") {
  std::mt19937_64 rng(7);
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  const OneParticleVector psi = random_vector(rng, 3);
  CHECK((a_minus(psi, b) * vacuum(b)).norm() == 0.0);
  CHECK((a_minus(psi, b) - a_plus(psi, b).adjoint()).norm() == 0.0);
  CHECK_THROWS_AS(a_minus(OneParticleVector::Zero(4), b), ShapeError);
}

TEST_CASE("annihilation matches the symmetric-tensor contraction") {
  std::mt19937_64 rng(11);
  for (int n_max : {0, 1}) {
    const FockBasis b(make_modeset(1, 1.0, n_max, 1.0), 3);
    const int m = b.modes().size();
    const OneParticleVector psi = random_vector(rng, m);
    const FockOperator a = a_minus(psi, b);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b.total(j) == 0) continue;
      const Tensor contracted = contract(symmetric_tensor(b.state(j)), psi);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.total(i) != b.total(j) - 1) {
          CHECK(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == Complex(0.0));
          continue;
        }
        const Complex oracle = tensor_inner(symmetric_tensor(b.state(i)), contracted);
        CHECK(std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - oracle) < 1e-13);
      }
    }
  }
}

TEST_CASE("two-mode contraction example") {
  ModeSet two = make_modeset(1, 1.0, 1, 1.0);
  two.lattice.pop_back();
  two.momenta.pop_back();
  two.energies.pop_back();
  const FockBasis b(two, 2);
  OneParticleVector f(2), g(2);
  f << Complex(0.3, -0.2), Complex(-1.1, 0.4);
  g << Complex(0.7, 0.1), Complex(0.2, -0.5);
  const auto s11 = *b.index_of({1, 1});
  FockVector gvec = FockVector::Zero(static_cast<Eigen::Index>(b.size()));
  gvec[static_cast<Eigen::Index>(*b.index_of({1, 0}))] = g[0];
  gvec[static_cast<Eigen::Index>(*b.index_of({0, 1}))] = g[1];
  const Complex got = fock_inner(gvec, a_minus(f, b) * basis_vector(b, s11));
  // |1,1> = (e0 e1 + e1 e0)/sqrt(2); contraction gives sqrt(2) * (conj f1 e0 + conj f0 e1)/sqrt(2).
  const Complex oracle = std::conj(g[0]) * std::conj(f[1]) + std::conj(g[1]) * std::conj(f[0]);
  CHECK(std::abs(got - oracle) < 1e-15);
}

TEST_CASE("inner product and norm") {
  std::mt19937_64 rng(3);
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  CHECK(fock_norm(vacuum(b)) == 1.0);
  const FockVector u = random_vector(rng, static_cast<Eigen::Index>(b.size()));
  const FockVector v = random_vector(rng, static_cast<Eigen::Index>(b.size()));
  CHECK(std::abs(fock_inner(u, v) - std::conj(fock_inner(v, u))) < 1e-15 * u.norm() * v.norm() * 10);
  const OneParticleVector psi = random_vector(rng, 3);
  CHECK(std::abs(fock_norm(a_plus(psi, b) * vacuum(b)) - psi.norm()) < 1e-12);
  CHECK_THROWS_AS(fock_inner(u, FockVector::Zero(2)), ShapeError);
}

TEST_CASE("safe subspace") {
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  CHECK(safe_subspace(b, 0).size() == b.size());
  CHECK(safe_subspace(b, 3) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(safe_subspace(b, 4), ParameterError);
  CHECK_THROWS_AS(safe_subspace(b, -1), ParameterError);
  ModeSet two = make_modeset(1, 1.0, 1, 1.0);
  two.lattice.pop_back();
  two.momenta.pop_back();
  two.energies.pop_back();
  CHECK(safe_subspace(FockBasis(two, 2), 1).size() == 3);
}

TEST_CASE("ladder commutator on the safe subspace") {
  std::mt19937_64 rng(2024);
  const FockBasis b(make_modeset(1, 1.0, 2, 1.0), 4);
  const auto safe = safe_subspace(b, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const OneParticleVector f = random_vector(rng, 5);
    const OneParticleVector g = random_vector(rng, 5);
    const FockOperator am = a_minus(f, b);
    const FockOperator ap = a_plus(g, b);
    FockOperator c = am * ap - ap * am;
    c.diagonal().array() -= f.dot(g);
    CHECK(restricted_norm(c, safe) < 1e-12);
  }
}

TEST_CASE("number grading") {
  std::mt19937_64 rng(5);
  const FockBasis b(make_modeset(1, 1.0, 1, 1.0), 3);
  const OneParticleVector psi = random_vector(rng, 3);
  const FockOperator ap = a_plus(psi, b);
  const FockOperator am = a_minus(psi, b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      if (b.total(i) != b.total(j) + 1) CHECK(ap(r, c) == Complex(0.0));
      if (b.total(i) + 1 != b.total(j)) CHECK(am(r, c) == Complex(0.0));
    }
  }
}

TEST_CASE("sparse field combination equals the dense sum") {
  std::mt19937_64 rng(9);
  const FockBasis b(make_modeset(1, 1.0, 2, 1.0), 3);
  const OneParticleVector alpha = random_vector(rng, 5);
  const FockOperator dense = a_plus(alpha, b) + a_minus(alpha, b);
  CHECK((FockOperator(field_combination(alpha, b)) - dense).norm() < 1e-14);
  CHECK(hermiticity_defect(dense) < 1e-14);
}
