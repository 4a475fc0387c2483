#pragma once

#include <cstdint>
#include <random>

#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"

namespace cohcost {

using Rng = std::mt19937_64;

inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return Rng(seed ^ trial); }

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}

inline CVector random_vector(std::size_t n, Rng& rng) {
  CVector v(n);
  for (auto& z : v) z = complex_normal(rng);
  return v;
}

inline ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = complex_normal(rng);
  return m;
}

inline PureState random_pure(std::size_t n, Rng& rng) { return PureState::normalize(random_vector(n, rng)); }

/// Haar unitary from modified Gram-Schmidt on a Ginibre matrix.
inline ComplexMatrix random_unitary_matrix(std::size_t n, Rng& rng) {
  ComplexMatrix g = ginibre(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(g(i, k)) * g(i, j);
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
  }
  return g;
}

inline UnitaryGate random_unitary(std::size_t n, Rng& rng) { return UnitaryGate(random_unitary_matrix(n, rng)); }

/// Hermitian with entries of unit scale.
inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
  ComplexMatrix g = ginibre(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

/// G G^dagger for a Ginibre n x k matrix.
inline ComplexMatrix random_wishart(std::size_t n, std::size_t k, Rng& rng) {
  ComplexMatrix g = ginibre(n, k, rng);
  return g * g.adjoint();
}

/// Normalized Wishart state of the given rank (full rank when rank == 0).
inline DensityMatrix random_density(std::size_t n, Rng& rng, std::size_t rank = 0) {
  ComplexMatrix w = random_wishart(n, rank == 0 ? n : rank, rng);
  w *= cplx(1.0 / w.trace().real(), 0.0);
  w = (w + w.adjoint()) * 0.5;
  return DensityMatrix::assume_valid(std::move(w));
}

/// Haar-random unitary acting blockwise on the eigenspaces of `a`
/// (eigenvalues grouped when consecutive gaps are below `tol`), so it
/// commutes with `a` exactly up to roundoff.
inline ComplexMatrix random_commuting_unitary(const ComplexMatrix& a, Rng& rng, double tol = 1e-9) {
  Spectrum sp = hermitian_eig(a);
  const std::size_t n = sp.values.size();
  ComplexMatrix block_u(n, n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && sp.values[end] - sp.values[end - 1] < tol) ++end;
    ComplexMatrix b = random_unitary_matrix(end - start, rng);
    for (std::size_t i = start; i < end; ++i)
      for (std::size_t j = start; j < end; ++j) block_u(i, j) = b(i - start, j - start);
    start = end;
  }
  return sp.vectors * block_u * sp.vectors.adjoint();
}

}  // namespace cohcost
