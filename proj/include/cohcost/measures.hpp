#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "cohcost/errors.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"

namespace cohcost {

/// Standard deviation sqrt(<A^2> - <A>^2) of A in the given state.
inline double variance(const PureState& s, const HermitianObservable& a) {
  require_same_dim(s.dim(), a.dim(), "variance");
  CVector av = a.mat() * s.vec();
  const double m = inner(s.vec(), av).real();
  for (std::size_t k = 0; k < av.size(); ++k) av[k] -= m * s.vec()[k];
  return norm2(av);
}

inline double variance(const DensityMatrix& rho, const HermitianObservable& a) {
  require_same_dim(rho.dim(), a.dim(), "variance");
  const double m = (rho.mat() * a.mat()).trace().real();
  ComplexMatrix b = a.mat() - ComplexMatrix::identity(a.dim()) * m;
  return std::sqrt(std::max(0.0, (rho.mat() * b * b).trace().real()));
}

/// Quantum Fisher information 2 sum_ab (p_a-p_b)^2/(p_a+p_b) |A_ab|^2.
inline double qfi(const DensityMatrix& rho, const HermitianObservable& a) {
  require_same_dim(rho.dim(), a.dim(), "qfi");
  if (auto v = rho.pure_vector()) {
    double sd = variance(PureState::normalize(*v), a);
    return 4.0 * sd * sd;
  }
  Spectrum sp = hermitian_eig(rho.mat());
  ComplexMatrix ab = sp.vectors.adjoint() * a.mat() * sp.vectors;
  const std::size_t n = rho.dim();
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double pi = sp.values[i], pj = sp.values[j];
      if (pi + pj < 1e-12) continue;
      f += (pi - pj) * (pi - pj) / (pi + pj) * std::norm(ab(i, j));
    }
  return 2.0 * f;
}

/// A pure-state ensemble {q_j, |phi_j>}.
struct Decomposition {
  std::vector<double> weights;
  std::vector<PureState> states;

  Decomposition(std::vector<double> w, std::vector<PureState> s) : weights(std::move(w)), states(std::move(s)) {
    if (weights.empty() || weights.size() != states.size()) throw ValidationError("decomposition size mismatch");
    double total = 0.0;
    for (double q : weights) {
      if (q < 0.0) throw ValidationError("decomposition weight is negative");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ValidationError("decomposition weights do not sum to 1");
    for (const auto& s2 : states)
      if (s2.dim() != states.front().dim()) throw ValidationError("decomposition states differ in dimension");
  }

  DensityMatrix density() const {
    const std::size_t d = states.front().dim();
    ComplexMatrix m(d, d);
    for (std::size_t j = 0; j < states.size(); ++j) m += states[j].projector() * weights[j];
    return DensityMatrix::assume_valid(std::move(m));
  }
};

/// 4 sum_j q_j V_A(phi_j)^2, an upper bound on the QFI of the mixture.
inline double qfi_decomposition_witness(const Decomposition& dec, const HermitianObservable& a) {
  double w = 0.0;
  for (std::size_t j = 0; j < dec.states.size(); ++j) {
    double sd = variance(dec.states[j], a);
    w += 4.0 * dec.weights[j] * sd * sd;
  }
  return w;
}

/// U^dagger A U - A.
inline ComplexMatrix charge_change(const UnitaryGate& u, const HermitianObservable& a) {
  require_same_dim(u.dim(), a.dim(), "charge_change");
  return u.mat().adjoint() * a.mat() * u.mat() - a.mat();
}

/// Half the spectral spread of U^dagger A U - A.
inline double gate_asymmetry(const UnitaryGate& u, const HermitianObservable& a) {
  return 0.5 * spectral_spread(charge_change(u, a));
}

/// Midpoint of the spectrum of U^dagger A U - A.
inline double centering_shift(const UnitaryGate& u, const HermitianObservable& a) {
  Spectrum sp = hermitian_eig(charge_change(u, a));
  return 0.5 * (sp.max() + sp.min());
}

/// Half the spectral spread of the Hermitian X = A - U^dagger A U.
inline double violation_asymmetry(const UnitaryGate& u, const HermitianObservable& a_tot) {
  return 0.5 * spectral_spread(-charge_change(u, a_tot));
}

struct ExtremalStates {
  PureState up;
  PureState down;
};

/// Eigenvectors of U^dagger A U - A for its largest and smallest eigenvalue.
inline ExtremalStates extremal_states(const UnitaryGate& u, const HermitianObservable& a) {
  Spectrum sp = hermitian_eig(charge_change(u, a));
  return {PureState::normalize(sp.vector(sp.values.size() - 1)), PureState::normalize(sp.vector(0))};
}

}  // namespace cohcost
