#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cohcost/errors.hpp"
#include "cohcost/implementation.hpp"
#include "cohcost/measures.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"

namespace cohcost {

/// How ||A_S|| enters the bounds: the given operator, or A_S - lambda_min I.
enum class NormConvention { Given, Shifted };

inline double charge_norm(const HermitianObservable& a, NormConvention conv = NormConvention::Given) {
  if (conv == NormConvention::Given) return operator_norm(a.mat());
  return spectral_spread(a.mat());
}

struct BoundReport {
  std::string name;
  double asym = 0.0;
  double delta = 0.0;
  double norm_a = 0.0;
  double chi = 0.0;
  double asym_violation = 0.0;
  double value = 0.0;
  double raw_value = 0.0;
  bool domain_ok = true;
  bool clamped = false;
};

namespace detail {

inline void require_positive_delta(double delta, const char* what) {
  if (!(delta > 0.0)) throw ValidationError(std::string(what) + ": delta must be positive");
}

inline BoundReport clamp_report(BoundReport r) {
  r.value = std::max(0.0, r.raw_value);
  r.clamped = r.raw_value < 0.0;
  return r;
}

}  // namespace detail

/// max(0, A/delta - 4||A_S||), a lower bound on sqrt(F(rho_E)).
inline BoundReport theorem1_report(double asym, double delta, double norm_a) {
  detail::require_positive_delta(delta, "theorem1_bound");
  if (delta > std::sqrt(2.0) * (1.0 + 1e-12)) throw ValidationError("theorem1_bound: delta exceeds sqrt(2)");
  BoundReport r{"theorem1", asym, delta, norm_a};
  r.raw_value = asym / delta - 4.0 * norm_a;
  return detail::clamp_report(r);
}

inline double theorem1_bound(double asym, double delta, double norm_a) {
  return theorem1_report(asym, delta, norm_a).value;
}

/// Largest delta for which the achievability bound is guaranteed.
inline double theorem2_delta_max(double asym, double norm_a) {
  if (norm_a == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * std::sqrt(2.0) * asym / (9.0 * norm_a);
}

struct Theorem2Value {
  double value;
  bool domain_ok;
};

/// A/delta + sqrt(2)||A_S|| with its validity domain.
inline Theorem2Value theorem2_bound(double asym, double delta, double norm_a) {
  detail::require_positive_delta(delta, "theorem2_bound");
  return {asym / delta + std::sqrt(2.0) * norm_a, delta <= theorem2_delta_max(asym, norm_a)};
}

inline BoundReport theorem2_report(double asym, double delta, double norm_a) {
  auto t = theorem2_bound(asym, delta, norm_a);
  BoundReport r{"theorem2", asym, delta, norm_a};
  r.raw_value = r.value = t.value;
  r.domain_ok = t.domain_ok;
  return r;
}

enum class Region { A, B, Neither };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::A:
      return "A";
    case Region::B:
      return "B";
    default:
      return "neither";
  }
}

/// sqrt(F) above which a set is guaranteed to exist, with delta clamped to the
/// achievability domain.
inline double region_b_boundary(double asym, double norm_a, double delta) {
  detail::require_positive_delta(delta, "region_b_boundary");
  if (asym == 0.0) return std::sqrt(2.0) * norm_a;
  const double d = std::min(delta, theorem2_delta_max(asym, norm_a));
  return asym / d + std::sqrt(2.0) * norm_a;
}

inline double region_a_boundary(double asym, double norm_a, double delta) {
  detail::require_positive_delta(delta, "region_a_boundary");
  return std::max(0.0, asym / delta - 4.0 * norm_a);
}

inline Region classify_region(double asym, double norm_a, double delta, double sqrt_f) {
  detail::require_positive_delta(delta, "classify_region");
  if (sqrt_f < asym / delta - 4.0 * norm_a) return Region::A;
  if (sqrt_f >= region_b_boundary(asym, norm_a, delta)) return Region::B;
  return Region::Neither;
}

/// sqrt(sum_i r_i (<A'-A>_{psi_i} - <A'-A>_rho)^2) with r_i = <psi_i|rho|psi_i>.
/// The basis may be partial provided rho is supported on its span.
inline double chi(const DensityMatrix& rho, const std::vector<PureState>& basis, const TargetSpec& target) {
  require_same_dim(rho.dim(), target.d_S(), "chi");
  if (basis.empty() || basis.size() > rho.dim()) throw ValidationError("chi: basis size out of range");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require_same_dim(basis[i].dim(), rho.dim(), "chi");
    for (std::size_t j = 0; j <= i; ++j) {
      cplx g = inner(basis[i].vec(), basis[j].vec());
      if (std::abs(g - cplx(i == j ? 1.0 : 0.0, 0.0)) > 1e-9) throw ValidationError("chi: basis is not orthonormal");
    }
  }
  ComplexMatrix d = charge_change(target.U_S, target.A_S);
  const double mean = (rho.mat() * d).trace().real();
  double rsum = 0.0, acc = 0.0;
  for (const auto& psi : basis) {
    double r = expectation(rho.mat(), psi.vec()).real();
    double m = expectation(d, psi.vec()).real();
    rsum += r;
    acc += r * (m - mean) * (m - mean);
  }
  if (std::abs(rsum - 1.0) > 1e-9) throw ValidationError("chi: state is not supported on the span of the basis");
  return std::sqrt(std::max(0.0, acc));
}

/// max(0, chi/(5 deltabar) - 4||A_S||).
inline BoundReport single_state_report(double chi_val, double deltabar, double norm_a) {
  detail::require_positive_delta(deltabar, "single_state_bound");
  BoundReport r{"single_state", 0.0, deltabar, norm_a, chi_val};
  r.raw_value = chi_val / (5.0 * deltabar) - 4.0 * norm_a;
  return detail::clamp_report(r);
}

inline double single_state_bound(double chi_val, double deltabar, double norm_a) {
  return single_state_report(chi_val, deltabar, norm_a).value;
}

/// max(0, 1/(5 sqrt(2) delta) - 4||A_S||).
inline BoundReport erasure_report(double delta, double norm_a) {
  detail::require_positive_delta(delta, "erasure_bound");
  BoundReport r{"erasure", 0.0, delta, norm_a, 1.0};
  r.raw_value = 1.0 / (5.0 * std::sqrt(2.0) * delta) - 4.0 * norm_a;
  return detail::clamp_report(r);
}

inline double erasure_bound(double delta, double norm_a) { return erasure_report(delta, norm_a).value; }

/// max(0, (A_gate - A_violation)/delta - 6 max(||A_S||, 2 A_violation)).
inline BoundReport theorem3_report(double asym_gate, double asym_violation, double delta, double norm_a) {
  detail::require_positive_delta(delta, "theorem3_bound");
  BoundReport r{"theorem3", asym_gate, delta, norm_a, 0.0, asym_violation};
  r.raw_value = (asym_gate - asym_violation) / delta - 6.0 * std::max(norm_a, 2.0 * asym_violation);
  return detail::clamp_report(r);
}

inline double theorem3_bound(double asym_gate, double asym_violation, double delta, double norm_a) {
  return theorem3_report(asym_gate, asym_violation, delta, norm_a).value;
}

}  // namespace cohcost
