#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cohcost/errors.hpp"
#include "cohcost/implementation.hpp"
#include "cohcost/measures.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"

namespace cohcost {

struct CommensurationOptions {
  double tolerance = 1e-9;
  std::int64_t max_denominator = 1000000;
  /// Largest allowed number of lattice steps spanned by the widest gap.
  std::int64_t max_steps_per_gap = 10000;
};

/// Levels h_i = h_0 + n_i * spacing of a commensurate spectrum.
struct LevelLattice {
  double spacing = 1.0;
  std::vector<std::int64_t> steps;
  std::int64_t max_steps = 0;
};

namespace detail {

struct Rational {
  std::int64_t p, q;
};

/// Smallest-denominator continued-fraction convergent within tol of x.
inline std::optional<Rational> rational_reconstruct(double x, double tol, std::int64_t max_q) {
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (a > 9.0e15) break;
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_q) break;
    if (std::abs(x - double(p2) / double(q2)) <= tol) return Rational{p2, q2};
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = r - a;
    if (frac <= 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

inline double level_scale(const std::vector<double>& levels) {
  double m = 1.0;
  for (double h : levels) m = std::max(m, std::abs(h));
  return m;
}

}  // namespace detail

/// Largest spacing s with every h_i - h_min an integer multiple of s.
inline LevelLattice commensurate_levels(const std::vector<double>& levels, CommensurationOptions opt = {}) {
  if (levels.empty()) throw ValidationError("commensurate_levels: no levels");
  const double h0 = *std::min_element(levels.begin(), levels.end());
  const double scale = detail::level_scale(levels);
  const double tol = opt.tolerance * scale;
  double g_ref = std::numeric_limits<double>::infinity();
  double g_max = 0.0;
  for (double h : levels) {
    double g = h - h0;
    if (g > tol) g_ref = std::min(g_ref, g);
    g_max = std::max(g_max, g);
  }
  LevelLattice out;
  out.steps.assign(levels.size(), 0);
  if (!std::isfinite(g_ref)) return out;

  std::vector<detail::Rational> ratios;
  std::int64_t lcm = 1;
  for (double h : levels) {
    double g = h - h0;
    if (g <= tol) continue;
    double x = g / g_ref;
    auto r = detail::rational_reconstruct(x, opt.tolerance * std::max(1.0, x), opt.max_denominator);
    if (!r) throw IncommensurateError("spectrum gaps are incommensurate (gap ratio " + std::to_string(x) + ")", x);
    lcm = std::lcm(lcm, r->q);
    if (lcm > opt.max_denominator) throw IncommensurateError("spectrum gaps are incommensurate (gap ratio " + std::to_string(x) + ")", x);
    ratios.push_back(*r);
  }
  std::int64_t g = lcm;
  for (const auto& r : ratios) g = std::gcd(g, r.p * (lcm / r.q));
  out.spacing = g_ref * double(g) / double(lcm);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double n = (levels[i] - h0) / out.spacing;
    out.steps[i] = std::llround(n);
    out.max_steps = std::max(out.max_steps, out.steps[i]);
  }
  if (out.max_steps > opt.max_steps_per_gap) {
    double worst = g_max / g_ref;
    throw IncommensurateError("spectrum gaps are incommensurate (gap ratio " + std::to_string(worst) +
                                  " needs " + std::to_string(out.max_steps) + " lattice steps)",
                              worst);
  }
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (std::abs(levels[i] - h0 - double(out.steps[i]) * out.spacing) > tol)
      throw IncommensurateError("spectrum gap is not a multiple of the lattice spacing", (levels[i] - h0) / g_ref);
  return out;
}

/// Sites x_k = k * spacing for k = -N..N.
struct PointerLattice {
  double spacing = 1.0;
  std::int64_t half_width = 0;
  /// Largest shift (in sites) the protocol applies.
  std::int64_t margin = 0;

  std::size_t dim() const { return std::size_t(2 * half_width + 1); }
  double site(std::int64_t k) const { return double(k) * spacing; }
  std::int64_t index_to_site(std::size_t idx) const { return std::int64_t(idx) - half_width; }
  bool interior(std::int64_t k) const { return std::llabs(k) <= half_width - margin; }
};

/// Normalized Gaussian probability outside the shift-safe interior.
inline double gaussian_tail_mass(const PointerLattice& lat, double zeta) {
  double total = 0.0, tail = 0.0;
  for (std::int64_t k = -lat.half_width; k <= lat.half_width; ++k) {
    double x = lat.site(k);
    double w = std::exp(-x * x / (2.0 * zeta * zeta));
    total += w;
    if (!lat.interior(k)) tail += w;
  }
  return tail / total;
}

inline PointerLattice build_lattice(const HermitianObservable& a_s, double zeta, double tail_bound = 1e-12) {
  if (!(zeta > 0.0)) throw ValidationError("build_lattice: zeta must be positive");
  Spectrum sp = hermitian_eig(a_s.mat());
  LevelLattice lv = commensurate_levels(sp.values);
  PointerLattice lat;
  lat.spacing = lv.spacing;
  lat.margin = lv.max_steps;
  const double gap = double(lv.max_steps) * lv.spacing;
  lat.half_width = std::max<std::int64_t>(1, std::int64_t(std::ceil((8.0 * zeta + gap) / lat.spacing - 1e-12)));
  while (gaussian_tail_mass(lat, zeta) >= tail_bound) ++lat.half_width;
  return lat;
}

/// diag(x_k) on the lattice.
inline HermitianObservable position_operator(const PointerLattice& lat) {
  std::vector<double> d(lat.dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = lat.site(lat.index_to_site(i));
  return HermitianObservable::diagonal(d);
}

struct GaussianPointer {
  double zeta;
  PointerLattice lattice;
  PureState state;
};

/// Amplitudes proportional to exp(-x_k^2 / 4 zeta^2).
inline GaussianPointer gaussian_pointer(const PointerLattice& lat, double zeta) {
  CVector v(lat.dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = lat.site(lat.index_to_site(i));
    v[i] = std::exp(-x * x / (4.0 * zeta * zeta));
  }
  return {zeta, lat, PureState::normalize(std::move(v))};
}

/// U_SE = sum_ij u_ij |i><j| (x) T^(n_i - n_j) in the A_S eigenbasis, with T|k> = |k-1> cyclic.
inline UnitaryGate shift_unitary(const UnitaryGate& u_s, const HermitianObservable& a_s, const PointerLattice& lat) {
  require_same_dim(u_s.dim(), a_s.dim(), "shift_unitary");
  const std::size_t ds = a_s.dim(), de = lat.dim();
  Spectrum sp = hermitian_eig(a_s.mat());
  const double scale = detail::level_scale(sp.values);
  std::vector<std::int64_t> n(ds);
  for (std::size_t i = 0; i < ds; ++i) {
    double x = (sp.values[i] - sp.values[0]) / lat.spacing;
    n[i] = std::llround(x);
    if (std::abs(sp.values[i] - sp.values[0] - double(n[i]) * lat.spacing) > 1e-9 * scale)
      throw IncommensurateError("A_S gap is not a multiple of the lattice spacing", x);
  }
  const ComplexMatrix& w = sp.vectors;
  ComplexMatrix ut = w.adjoint() * u_s.mat() * w;

  std::vector<std::int64_t> shifts;
  for (std::size_t i = 0; i < ds; ++i)
    for (std::size_t j = 0; j < ds; ++j) shifts.push_back(n[i] - n[j]);
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());

  const std::int64_t period = std::int64_t(de);
  ComplexMatrix u(ds * de, ds * de);
  for (std::int64_t m : shifts) {
    ComplexMatrix b(ds, ds);
    for (std::size_t i = 0; i < ds; ++i)
      for (std::size_t j = 0; j < ds; ++j) {
        if (n[i] - n[j] != m || ut(i, j) == cplx(0.0, 0.0)) continue;
        for (std::size_t a = 0; a < ds; ++a)
          for (std::size_t c = 0; c < ds; ++c) b(a, c) += w(a, i) * ut(i, j) * std::conj(w(c, j));
      }
    for (std::size_t l = 0; l < de; ++l) {
      std::int64_t k = ((std::int64_t(l) - m) % period + period) % period;
      for (std::size_t a = 0; a < ds; ++a)
        for (std::size_t c = 0; c < ds; ++c) u(a * de + std::size_t(k), c * de + l) += b(a, c);
    }
  }
  return UnitaryGate::assume_unitary(std::move(u));
}

/// 9 A / (2 sqrt 2).
inline double lemma_threshold(double asym) { return 9.0 * asym / (2.0 * std::sqrt(2.0)); }

struct GaussianProtocol {
  double zeta;
  PointerLattice lattice;
  ImplementationSet set;
};

inline GaussianProtocol protocol_for_zeta(const TargetSpec& target, double zeta, double tail_bound = 1e-12) {
  PointerLattice lat = build_lattice(target.A_S, zeta, tail_bound);
  GaussianPointer ptr = gaussian_pointer(lat, zeta);
  UnitaryGate u = shift_unitary(target.U_S, target.A_S, lat);
  ImplementationSet set(target.d_S(), position_operator(lat), DensityMatrix::from_pure(ptr.state), std::move(u));
  return {zeta, lat, std::move(set)};
}

/// The Gaussian protocol with 2 zeta = sqrt(F).
inline GaussianProtocol protocol_for_target(const TargetSpec& target, double F, double tail_bound = 1e-12) {
  if (!(F > 0.0)) throw ValidationError("protocol_for_target: F must be positive");
  return protocol_for_zeta(target, std::sqrt(F) / 2.0, tail_bound);
}

/// (A / 2 zeta)(1 + ||A_S|| / (sqrt 2 zeta)); throws DomainError below the lemma threshold.
inline double protocol_error_bound(double asym, double norm_a, double zeta) {
  if (!(zeta > 0.0)) throw ValidationError("protocol_error_bound: zeta must be positive");
  if (zeta < lemma_threshold(asym) * (1.0 - 1e-12))
    throw DomainError("protocol_error_bound: zeta " + std::to_string(zeta) + " is below the threshold " +
                      std::to_string(lemma_threshold(asym)));
  return asym / (2.0 * zeta) * (1.0 + norm_a / (std::sqrt(2.0) * zeta));
}

inline double protocol_error_bound(const TargetSpec& target, double zeta) {
  return protocol_error_bound(gate_asymmetry(target.U_S, target.A_S), operator_norm(target.A_S.mat()), zeta);
}

/// Operator K = W M W^dagger with M_ki = sum_j conj(u_jk) u_ji exp(-(h_j - h_i - h)^2 / 8 zeta^2)
/// in the A_S eigenbasis W, where j labels the output level and h is the centering shift.
inline ComplexMatrix lower_bound_operator(const TargetSpec& target, double zeta) {
  const std::size_t d = target.d_S();
  Spectrum sp = hermitian_eig(target.A_S.mat());
  const double h = centering_shift(target.U_S, target.A_S);
  const ComplexMatrix& w = sp.vectors;
  ComplexMatrix ut = w.adjoint() * target.U_S.mat() * w;
  ComplexMatrix m(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double x = sp.values[j] - sp.values[i] - h;
        s += std::conj(ut(j, k)) * ut(j, i) * std::exp(-x * x / (8.0 * zeta * zeta));
      }
      m(k, i) = s;
    }
  return w * m * w.adjoint();
}

/// |Tr[K rho_S]|, a lower bound on the entanglement fidelity of the protocol.
inline double fidelity_lower_bound(const TargetSpec& target, double zeta, const DensityMatrix& rho_s) {
  require_same_dim(target.d_S(), rho_s.dim(), "fidelity_lower_bound");
  return std::abs((lower_bound_operator(target, zeta) * rho_s.mat()).trace());
}

}  // namespace cohcost
